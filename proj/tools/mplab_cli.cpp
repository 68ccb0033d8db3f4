#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mplab/analysis.hpp"
#include "mplab/choice_string.hpp"
#include "mplab/dataset.hpp"
#include "mplab/menu.hpp"
#include "mplab/menu_io.hpp"
#include "mplab/service.hpp"
#include "mplab/session.hpp"
#include "mplab/tables.hpp"
#include "mplab/text_io.hpp"

namespace fs = std::filesystem;
using namespace mplab;

namespace {

struct DatasetLoad {
    Cohort cohort;
    std::vector<LoadWarning> warnings;
};

// A directory of choices_*.tsv files, a canonical .jsonl export, or a single
// session table.
DatasetLoad load_dataset(const fs::path& path) {
    if (!fs::exists(path)) throw Error("dataset " + path.string() + " does not exist");
    if (fs::is_directory(path)) {
        auto load = load_cohort_dir(path);
        return {std::move(load.cohort), std::move(load.warnings)};
    }
    const auto text = read_text_file(path);
    if (path.extension() == ".jsonl") return {import_canonical(text), {}};
    auto table = load_session_table(text);
    return {Cohort(std::move(table.records), {}), std::move(table.warnings)};
}

void print_validation(const TaskMenu& menu, const MenuValidation& v, double tolerance) {
    std::cout << "menu: " << to_string(menu.kind()) << " " << to_string(menu.domain()) << '\n';
    if (!v.error.empty()) std::cout << "calibration error: " << v.error << '\n';
    std::cout << "boundary  cutoff    computed    deviation\n";
    for (std::size_t i = 0; i < v.boundaries.size(); ++i)
        std::printf("%-9zu %-9s %-11s %s\n", i + 1, format_fixed(kCrraCutoffs[i], 2).c_str(),
                    format_fixed(v.boundaries[i], 4).c_str(), format_fixed(v.deviations[i], 4).c_str());
    std::cout << "max |deviation|: " << format_fixed(v.max_abs_deviation, 4) << " (tolerance "
              << format_number(tolerance) << ")\n"
              << "strictly increasing: " << (v.strictly_increasing ? "yes" : "no") << '\n';
    if (menu.kind() != DesignKind::BINS)
        std::cout << "last row B dominant: " << (v.last_row_b_dominant ? "yes" : "no") << '\n';
    std::cout << "payout range: " << format_fixed(menu.min_payout(), 2) << " .. "
              << format_fixed(menu.max_payout(), 2) << '\n'
              << "status: " << (v.ok ? "ok" : "out of tolerance") << '\n';
}

int cmd_calibrate(const std::string& kind_text, const std::string& domain_text, const std::string& schedule,
                  double high_b, const std::string& out, double tolerance) {
    const auto kind = parse_design_kind(kind_text);
    const auto domain = parse_menu_domain(domain_text);
    std::optional<TaskMenu> menu;
    switch (kind) {
        case DesignKind::HL:
            if (!schedule.empty()) throw InvalidArgument("HL menus take --high-b, not a schedule file");
            menu = hl_menu(high_b, domain);
            break;
        case DesignKind::CVU:
            menu = cvu_menu(schedule.empty() ? default_cvu_schedule() : read_cvu_schedule(read_text_file(schedule)), domain);
            break;
        case DesignKind::BINS:
            menu = bins_menu(schedule.empty() ? default_bins_schedule() : read_bins_schedule(read_text_file(schedule)), domain);
            break;
    }
    const auto v = validate_menu(*menu, tolerance);
    print_validation(*menu, v, tolerance);
    if (!out.empty()) {
        save_menu_file(out, *menu);
        std::cout << "wrote " << out << '\n';
    }
    return v.ok ? 0 : 1;
}

int cmd_validate(const std::string& file, double tolerance) {
    const auto menu = load_menu_file(file);
    const auto v = validate_menu(menu, tolerance);
    print_validation(menu, v, tolerance);
    return v.ok ? 0 : 1;
}

std::string pvalue(double p) { return format_fixed(p, 4); }

int cmd_analyze(const std::string& dataset, const std::string& out_dir, const std::string& cvu_schedule) {
    const auto load = load_dataset(dataset);
    const auto& cohort = load.cohort;
    if (cohort.empty()) throw Error("dataset " + dataset + " has no subjects");
    const auto schedule = cvu_schedule.empty() ? default_cvu_schedule() : read_cvu_schedule(read_text_file(cvu_schedule));

    std::ostringstream out;
    out << "subjects: " << cohort.size() << '\n' << "sessions:";
    for (const auto& [name, n] : cohort.session_sizes()) out << ' ' << name << '=' << n;
    out << '\n' << "parse warnings: " << load.warnings.size() << '\n';
    const auto mono = validate_monotonicity(cohort);
    out << "monotone strings: " << mono.passed << '/' << mono.subjects << '\n';

    const auto s = cohort_summary(cohort);
    out << "\ntask  mean_response  mean_midpoint  sd_midpoint  loving  neutral  averse\n";
    for (const auto& t : s.tasks)
        out << t.task << "     " << format_fixed(t.mean_response, 4) << "         " << format_fixed(t.mean_midpoint, 4)
            << "         " << format_fixed(t.sd_midpoint, 4) << "       " << format_fixed(t.shares.loving, 3) << "   "
            << format_fixed(t.shares.neutral, 3) << "    " << format_fixed(t.shares.averse, 3) << '\n';
    out << "\nattitude shares (mean over tasks): loving " << format_fixed(s.shares.loving, 3) << ", neutral "
        << format_fixed(s.shares.neutral, 3) << ", averse " << format_fixed(s.shares.averse, 3) << '\n'
        << "payoff-approach mean CRRA: " << format_fixed(s.payoff_mean, 4) << " (sd " << format_fixed(s.payoff_sd, 4)
        << ")\nprice-approach mean CRRA:  " << format_fixed(s.price_mean, 4) << " (sd " << format_fixed(s.price_sd, 4)
        << ")\n";
    const auto sp = switching_profile(cohort);
    out << "switching: any " << format_fixed(sp.any_switch, 3) << ", neutral/averse only "
        << format_fixed(sp.neutral_averse_only, 3) << ", all three " << format_fixed(sp.all_three, 3)
        << ", loving mixed " << format_fixed(sp.loving_mixed, 3) << '\n';

    out << "\ncomparison             signrank z  p        sign +/-/0   Pr(neg)  t        Pr(T<t)\n";
    auto safe = [](auto f) -> std::string {
        try {
            return f();
        } catch (const DegenerateSampleError&) {
            return "degenerate";
        }
    };
    for (auto c : kComparisons) {
        const auto resp = paired_sample(cohort, c, Measure::Response);
        const auto mid = paired_sample(cohort, c, Measure::Midpoint);
        const auto sg = sign_test(resp);
        std::string line = comparison_label(c);
        line.resize(23, ' ');
        line += safe([&] {
            const auto w = wilcoxon_signed_rank(resp);
            return format_fixed(w.z, 3) + "      " + pvalue(w.p_two_sided);
        });
        line += "   " + std::to_string(sg.n_positive) + "/" + std::to_string(sg.n_negative) + "/" +
                std::to_string(sg.n_zero) + "     " + pvalue(sg.p_negative) + "   ";
        line += safe([&] {
            const auto t = paired_t_test(mid);
            return format_fixed(t.t, 4) + "  " + pvalue(t.p_lower);
        });
        out << line << '\n';
    }
    const auto rp = risk_premium_sample(cohort, schedule);
    out << "\nRP Task2 mean " << format_fixed(mean(rp.x()), 4) << ", RP Task5 mean " << format_fixed(mean(rp.y()), 4)
        << " (CVU schedule: " << (cvu_schedule.empty() ? "default" : cvu_schedule) << ")\n";
    std::cout << out.str();

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file_atomic(fs::path(out_dir) / "summary.txt", out.str());
        write_text_file_atomic(fs::path(out_dir) / "responses.tsv",
                               to_columnar_text(export_distributions(cohort, DistributionKind::Responses)));
        write_text_file_atomic(fs::path(out_dir) / "midpoints.tsv",
                               to_columnar_text(export_distributions(cohort, DistributionKind::Midpoints)));
        write_text_file_atomic(fs::path(out_dir) / "risk_premium.tsv",
                               to_columnar_text(export_distributions(cohort, DistributionKind::RiskPremium, schedule)));
        std::cout << "wrote summary.txt, responses.tsv, midpoints.tsv, risk_premium.tsv to " << out_dir << '\n';
    }
    return 0;
}

int cmd_reproduce(const std::string& dataset, const std::string& cvu_schedule, const std::string& out_dir, bool json_only) {
    const auto load = load_dataset(dataset);
    if (load.cohort.empty()) {
        std::cerr << "error: dataset " << dataset << " has no subjects; no tables written\n";
        return 2;
    }
    std::optional<CvuSchedule> schedule;
    if (!cvu_schedule.empty()) schedule = read_cvu_schedule(read_text_file(cvu_schedule));
    const auto r = reproduce_tables(load.cohort, schedule);
    const auto text = to_text(r);
    const auto json = to_json(r);
    std::cout << (json_only ? json : text);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file_atomic(fs::path(out_dir) / "reproduction.txt", text);
        write_text_file_atomic(fs::path(out_dir) / "reproduction.json", json);
    }
    return r.all_within_tolerance() ? 0 : 1;
}

struct RDistribution {
    enum { Fixed, Uniform } kind = Fixed;
    double a = 0, b = 0;
};

RDistribution parse_r_distribution(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "fixed") return {RDistribution::Fixed, parse_double(parts[1]), 0};
    if (parts.size() == 3 && parts[0] == "uniform") {
        RDistribution d{RDistribution::Uniform, parse_double(parts[1]), parse_double(parts[2])};
        if (!(d.b > d.a)) throw InvalidArgument("uniform:lo:hi needs lo < hi");
        return d;
    }
    throw InvalidArgument("r distribution must be fixed:<r> or uniform:<lo>:<hi>");
}

int cmd_simulate(int n, std::uint64_t seed, const std::string& dist_text, const std::string& menus_dir,
                 const std::string& out_dir, const std::string& prefix) {
    if (n < 1) throw InvalidArgument("--n must be positive");
    const auto dist = parse_r_distribution(dist_text);
    ServiceConfig sc;
    sc.menus_dir = menus_dir;
    const auto cfg = experiment_config_for(sc);
    std::vector<SubjectRecord> records;
    std::string agents = "subject\tr\n";
    for (int i = 1; i <= n; ++i) {
        const auto id = prefix + std::to_string(i);
        double r = dist.a;
        if (dist.kind == RDistribution::Uniform) {
            DeterministicRng rng(seed, id, "agent");
            r = dist.a + (dist.b - dist.a) * static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
        }
        std::array<int, 6> responses{};
        for (int t = 1; t <= 6; ++t) responses[static_cast<std::size_t>(t - 1)] = simulate_eut_agent(cfg.task(t), {r});
        records.push_back(make_subject_record(id, responses));
        agents += id + '\t' + format_number(r) + '\n';
    }
    const Cohort cohort(records, {});
    fs::create_directories(out_dir);
    write_text_file_atomic(fs::path(out_dir) / ("choices_" + prefix + ".tsv"), write_session_table(records));
    write_text_file_atomic(fs::path(out_dir) / "agents.tsv", agents);
    write_text_file_atomic(fs::path(out_dir) / "cohort.jsonl", export_canonical(cohort));
    std::cout << "simulated " << n << " agents into " << out_dir << '\n';
    return 0;
}

int cmd_serve(const std::string& config_file, int port, const std::string& data_dir, const std::string& host) {
    ServiceConfig cfg = config_file.empty() ? ServiceConfig{} : load_service_config(config_file);
    apply_env_overrides(cfg);
    if (port > 0) cfg.port = port;
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    if (!host.empty()) cfg.host = host;
    Service service(cfg);
    std::cout << "serving on http://" << cfg.host << ':' << cfg.port << "\nexperimenter token: "
              << service.experimenter_token() << "\ndata directory: " << cfg.data_dir.string() << std::endl;
    serve_http(service, cfg.host, cfg.port);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mplab: multiple-price-list menus, sessions and analysis"};
    app.require_subcommand(1);

    std::string kind = "hl", domain = "payoff", schedule, out, menu_file;
    double high_b = kDefaultHlHighB, tolerance = 0.01;
    auto* calibrate = app.add_subcommand("calibrate", "Build a calibrated menu and report its CRRA boundaries");
    calibrate->add_option("--kind", kind, "hl, cvu or bins")->capture_default_str();
    calibrate->add_option("--domain", domain, "payoff or price")->capture_default_str();
    calibrate->add_option("--schedule", schedule, "CVU or BINS schedule file (defaults otherwise)");
    calibrate->add_option("--high-b", high_b, "HL option B high payoff")->capture_default_str();
    calibrate->add_option("--tolerance", tolerance, "allowed |boundary - cutoff|")->capture_default_str();
    calibrate->add_option("-o,--out", out, "write the menu file here");

    auto* validate = app.add_subcommand("validate-menu", "Check a menu file against the CRRA cutoffs");
    validate->add_option("menu", menu_file, "menu file")->required()->check(CLI::ExistingFile);
    validate->add_option("--tolerance", tolerance, "allowed |boundary - cutoff|")->capture_default_str();

    std::string dataset = MPLAB_DEFAULT_DATASET, out_dir, cvu_schedule;
    auto* analyze = app.add_subcommand("analyze", "Summarize a dataset and run the paired tests");
    analyze->add_option("dataset", dataset, "cohort directory, .jsonl export or session table")->capture_default_str();
    analyze->add_option("--cvu-schedule", cvu_schedule, "CVU schedule the cohort was elicited with");
    analyze->add_option("-o,--out", out_dir, "write summary and distribution exports here");

    bool json_only = false;
    auto* reproduce = app.add_subcommand("reproduce", "Compare the published test tables with the dataset");
    reproduce->add_option("dataset", dataset, "cohort directory, .jsonl export or session table")->capture_default_str();
    reproduce->add_option("--cvu-schedule", cvu_schedule, "CVU schedule file; enables the conditional tables");
    reproduce->add_option("-o,--out", out_dir, "write reproduction.txt and reproduction.json here");
    reproduce->add_flag("--json", json_only, "print JSON instead of text");

    int n = 88;
    std::uint64_t seed = 1;
    std::string r_dist = "uniform:-1.4:1.8", menus_dir, prefix = "SIM";
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort of expected-utility agents");
    simulate->add_option("--n", n, "number of agents")->capture_default_str();
    simulate->add_option("--seed", seed, "generator seed")->capture_default_str();
    simulate->add_option("--r", r_dist, "fixed:<r> or uniform:<lo>:<hi>")->capture_default_str();
    simulate->add_option("--menus", menus_dir, "directory with task1.menu .. task6.menu");
    simulate->add_option("--prefix", prefix, "subject id prefix")->capture_default_str();
    simulate->add_option("-o,--out", out_dir, "output directory")->required();

    std::string config_file, data_dir, host;
    int port = 0;
    auto* serve = app.add_subcommand("serve", "Run the HTTP+JSON session service");
    serve->add_option("--config", config_file, "service config (JSON)")->check(CLI::ExistingFile);
    serve->add_option("--port", port, "listen port (overrides config and MPL_PORT)");
    serve->add_option("--host", host, "listen address");
    serve->add_option("--data-dir", data_dir, "event log directory (overrides config and MPL_DATA_DIR)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*calibrate) return cmd_calibrate(kind, domain, schedule, high_b, out, tolerance);
        if (*validate) return cmd_validate(menu_file, tolerance);
        if (*analyze) return cmd_analyze(dataset, out_dir, cvu_schedule);
        if (*reproduce) return cmd_reproduce(dataset, cvu_schedule, out_dir, json_only);
        if (*simulate) return cmd_simulate(n, seed, r_dist, menus_dir, out_dir, prefix);
        if (*serve) return cmd_serve(config_file, port, data_dir, host);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what();
        if (e.line()) std::cerr << " (line " << e.line() << ")";
        std::cerr << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
