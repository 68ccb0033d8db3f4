#include "mplab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mplab/choice_string.hpp"
#include "mplab/error.hpp"
#include "mplab/menu.hpp"
#include "mplab/text_io.hpp"

namespace mplab {

namespace {

using ordered_json = nlohmann::ordered_json;

char field_letter(std::size_t index) { return static_cast<char>('A' + index); }

bool is_header(std::string_view first_cell) {
    std::string s(trim(first_cell));
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s == "subject";
}

char detect_separator(std::string_view line) {
    return line.find('\t') != std::string_view::npos ? '\t' : ',';
}

enum class FieldKind { Integer, Number, Text };

struct FieldRule {
    FieldKind kind;
    double lo;
    double hi;
    std::vector<int> excluded;  // codes inside [lo, hi] that the key does not define
};

const std::array<FieldRule, kDemographicFieldCount>& field_rules() {
    constexpr double inf = 1e300;
    static const std::array<FieldRule, kDemographicFieldCount> rules = {{
        {FieldKind::Integer, 1900, 2100, {}},  // A birth year
        {FieldKind::Integer, 0, 1, {}},        // B gender
        {FieldKind::Integer, 0, 6, {}},        // C race
        {FieldKind::Integer, 0, 5, {}},        // D class status
        {FieldKind::Integer, 0, 12, {7}},      // E college
        {FieldKind::Integer, 0, 4, {}},        // F major
        {FieldKind::Number, 0, inf, {}},       // G credit hours
        {FieldKind::Integer, 0, 5, {}},        // H previous experiments
        {FieldKind::Integer, 0, 5, {}},        // I previous lottery experiments
        {FieldKind::Integer, 0, 1, {}},        // J marital status
        {FieldKind::Number, 0, inf, {}},       // K hours worked
        {FieldKind::Number, 0, inf, {}},       // L hourly earnings
        {FieldKind::Integer, 0, 2, {}},        // M financial dependency
        {FieldKind::Integer, 0, 7, {}},        // N family income (0 = not reported)
        {FieldKind::Integer, 1, inf, {}},      // O household size
        {FieldKind::Number, 0, inf, {}},       // P height
        {FieldKind::Number, 0, inf, {}},       // Q weight
        {FieldKind::Text, 0, 0, {}},           // R country
        {FieldKind::Text, 0, 0, {}},           // S state
        {FieldKind::Integer, 1, 9, {}},        // T stated attitude, economic decisions
        {FieldKind::Integer, 1, 9, {}},        // U stated attitude, lotteries
    }};
    return rules;
}

double numeric_field(std::size_t index, const std::string& text, std::size_t row) {
    const auto& rule = field_rules()[index];
    const char letter = field_letter(index);
    double v;
    try {
        v = parse_double(text);
    } catch (const ParseError&) {
        throw ValidationError(std::string("field ") + letter + ": '" + text + "' is not a number",
                              letter, row);
    }
    if (rule.kind == FieldKind::Integer && v != std::floor(v))
        throw ValidationError(std::string("field ") + letter + ": code must be an integer",
                              letter, row);
    const bool excluded = std::find(rule.excluded.begin(), rule.excluded.end(),
                                    static_cast<int>(v)) != rule.excluded.end();
    if (v < rule.lo || v > rule.hi || excluded)
        throw ValidationError(std::string("field ") + letter + ": value " + text +
                                  " outside the allowed codes",
                              letter, row);
    return v;
}

ParsedChoice parse_task(std::string_view cell, int task, std::size_t line) {
    try {
        return parse_choice_string(cell, task_design(task));
    } catch (const ParseError& e) {
        throw ParseError("task " + std::to_string(task) + ": " + e.what(), line, e.position());
    }
}

ordered_json demographics_json(const DemographicRecord& rec) {
    ordered_json obj = ordered_json::object();
    const auto fields = demographic_fields(rec);
    for (std::size_t i = 0; i < fields.size(); ++i) obj[std::string(1, field_letter(i))] = fields[i];
    return obj;
}

}  // namespace

std::string session_of(std::string_view subject_id) {
    std::string out;
    for (char c : subject_id) {
        if (!std::isalpha(static_cast<unsigned char>(c))) break;
        out.push_back(c);
    }
    return out;
}

SessionTable load_session_table(std::string_view doc) {
    SessionTable table;
    std::set<std::string, std::less<>> seen;
    const auto lines = split_lines(doc);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t number = i + 1;
        if (trim(lines[i]).empty()) continue;
        const auto cells = split(lines[i], detect_separator(lines[i]));
        if (is_header(cells[0])) continue;
        if (cells.size() != 7)
            throw ParseError("line " + std::to_string(number) + ": expected subject and 6 task columns, got " +
                                 std::to_string(cells.size()) + " columns",
                             number);
        SubjectRecord rec;
        rec.subject_id = std::string(trim(cells[0]));
        if (rec.subject_id.empty()) throw ParseError("line " + std::to_string(number) + ": empty subject id", number);
        if (!seen.insert(rec.subject_id).second)
            throw ParseError("line " + std::to_string(number) + ": duplicate subject " + rec.subject_id,
                             number);
        rec.session = session_of(rec.subject_id);
        for (int task = 1; task <= 6; ++task) {
            const auto idx = static_cast<std::size_t>(task - 1);
            rec.raw[idx] = std::string(trim(cells[idx + 1]));
            const auto parsed = parse_task(rec.raw[idx], task, number);
            rec.responses[idx] = parsed.response;
            rec.length_anomaly[idx] = parsed.length_anomaly;
            if (parsed.length_anomaly)
                table.warnings.push_back({number, rec.subject_id, task,
                                          "choice string has " + std::to_string(parsed.symbol_count) +
                                              " symbols, expected 10"});
        }
        table.records.push_back(std::move(rec));
    }
    return table;
}

SubjectRecord make_subject_record(std::string subject_id, const std::array<int, 6>& responses) {
    SubjectRecord rec;
    rec.session = session_of(subject_id);
    rec.subject_id = std::move(subject_id);
    rec.responses = responses;
    for (int task = 1; task <= 6; ++task) {
        const auto idx = static_cast<std::size_t>(task - 1);
        rec.raw[idx] = render_choice_string(responses[idx], task_design(task));
    }
    return rec;
}

std::string write_session_table(const std::vector<SubjectRecord>& records) {
    std::string out = "subject\ttask1\ttask2\ttask3\ttask4\ttask5\ttask6\n";
    for (const auto& rec : records) {
        out += rec.subject_id;
        for (int task = 1; task <= 6; ++task)
            out += '\t' + render_choice_string(rec.response(task), task_design(task));
        out += '\n';
    }
    return out;
}

DemographicRecord demographic_from_fields(
    std::string subject_id,
    const std::array<std::optional<std::string>, kDemographicFieldCount>& fields, std::size_t row) {
    std::array<std::string, kDemographicFieldCount> text;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const char letter = field_letter(i);
        if (!fields[i] || trim(*fields[i]).empty())
            throw ValidationError(std::string("field ") + letter + " is missing", letter, row);
        text[i] = std::string(trim(*fields[i]));
    }
    auto num = [&](std::size_t i) { return numeric_field(i, text[i], row); };
    auto code = [&](std::size_t i) { return static_cast<int>(num(i)); };

    DemographicRecord rec;
    rec.subject_id = std::move(subject_id);
    rec.birth_year = code(0);
    rec.gender = code(1);
    rec.race = code(2);
    rec.class_status = code(3);
    rec.college = code(4);
    rec.major = code(5);
    rec.credit_hours = num(6);
    rec.prior_experiments = code(7);
    rec.prior_risk_experiments = code(8);
    rec.marital_status = code(9);
    rec.hours_worked = num(10);
    rec.hourly_earnings = num(11);
    rec.financial_dependency = code(12);
    rec.family_income = code(13);
    rec.household_size = code(14);
    rec.height = num(15);
    rec.weight = num(16);
    rec.country = text[17];
    rec.state = text[18];
    rec.attitude_general = code(19);
    rec.attitude_lottery = code(20);
    return rec;
}

std::array<std::string, kDemographicFieldCount> demographic_fields(const DemographicRecord& r) {
    auto n = [](double v) { return format_number(v); };
    auto i = [](int v) { return std::to_string(v); };
    return {i(r.birth_year),        i(r.gender),           i(r.race),
            i(r.class_status),      i(r.college),          i(r.major),
            n(r.credit_hours),      i(r.prior_experiments), i(r.prior_risk_experiments),
            i(r.marital_status),    n(r.hours_worked),     n(r.hourly_earnings),
            i(r.financial_dependency), i(r.family_income), i(r.household_size),
            n(r.height),            n(r.weight),           r.country,
            r.state,                i(r.attitude_general), i(r.attitude_lottery)};
}

void validate_demographics(const DemographicRecord& rec, std::size_t row) {
    std::array<std::optional<std::string>, kDemographicFieldCount> fields;
    const auto text = demographic_fields(rec);
    std::copy(text.begin(), text.end(), fields.begin());
    demographic_from_fields(rec.subject_id, fields, row);
}

std::vector<DemographicRecord> load_demographics(std::string_view doc) {
    std::vector<DemographicRecord> out;
    std::set<std::string, std::less<>> seen;
    const auto lines = split_lines(doc);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t number = i + 1;
        if (trim(lines[i]).empty()) continue;
        const auto cells = split(lines[i], '\t');
        if (is_header(cells[0])) continue;
        if (cells.size() > kDemographicFieldCount + 1)
            throw ParseError("line " + std::to_string(number) + ": more than 21 answer columns",
                             number);
        std::array<std::optional<std::string>, kDemographicFieldCount> fields;
        for (std::size_t f = 0; f + 1 < cells.size(); ++f) fields[f] = std::string(cells[f + 1]);
        std::string id(trim(cells[0]));
        if (!seen.insert(id).second)
            throw ParseError("line " + std::to_string(number) + ": duplicate subject " + id, number);
        out.push_back(demographic_from_fields(std::move(id), fields, number));
    }
    return out;
}

std::string write_demographics(const std::vector<DemographicRecord>& records) {
    std::string out = "subject";
    for (std::size_t i = 0; i < kDemographicFieldCount; ++i) out += std::string("\t") + field_letter(i);
    out += '\n';
    for (const auto& rec : records) {
        out += rec.subject_id;
        for (const auto& f : demographic_fields(rec)) out += '\t' + f;
        out += '\n';
    }
    return out;
}

Cohort::Cohort(std::vector<SubjectRecord> subjects, std::vector<DemographicRecord> demographics) {
    std::map<std::string, std::size_t> index;
    for (auto& s : subjects) {
        if (index.count(s.subject_id))
            throw InvalidArgument("duplicate subject id " + s.subject_id);
        index[s.subject_id] = members_.size();
        members_.push_back({std::move(s), std::nullopt});
    }
    for (auto& d : demographics) {
        auto it = index.find(d.subject_id);
        if (it == index.end())
            throw InvalidArgument("demographics for unknown subject " + d.subject_id);
        auto& slot = members_[it->second].demographics;
        if (slot) throw InvalidArgument("duplicate demographics for " + d.subject_id);
        slot = std::move(d);
    }
}

const CohortMember* Cohort::find(std::string_view subject_id) const {
    for (const auto& m : members_)
        if (m.choices.subject_id == subject_id) return &m;
    return nullptr;
}

std::vector<std::pair<std::string, std::size_t>> Cohort::session_sizes() const {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& m : members_) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const auto& p) { return p.first == m.choices.session; });
        if (it == out.end())
            out.emplace_back(m.choices.session, 1);
        else
            ++it->second;
    }
    return out;
}

CohortLoad load_cohort_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
    std::vector<std::filesystem::path> choice_files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("choices_", 0) == 0 && entry.path().extension() == ".tsv")
            choice_files.push_back(entry.path());
    }
    std::sort(choice_files.begin(), choice_files.end());

    CohortLoad load;
    std::vector<SubjectRecord> subjects;
    std::vector<DemographicRecord> demographics;
    for (const auto& path : choice_files) {
        auto table = load_session_table(read_text_file(path));
        for (auto& w : table.warnings) w.message = path.filename().string() + ": " + w.message;
        load.warnings.insert(load.warnings.end(), table.warnings.begin(), table.warnings.end());
        subjects.insert(subjects.end(), table.records.begin(), table.records.end());

        const auto stem = path.stem().string().substr(std::string("choices_").size());
        const auto demo = dir / ("demographics_" + stem + ".tsv");
        if (std::filesystem::exists(demo)) {
            auto recs = load_demographics(read_text_file(demo));
            demographics.insert(demographics.end(), recs.begin(), recs.end());
        }
    }
    load.cohort = Cohort(std::move(subjects), std::move(demographics));
    return load;
}

std::string export_canonical(const Cohort& cohort) {
    std::string out;
    for (const auto& m : cohort.members()) {
        ordered_json j;
        j["subject"] = m.choices.subject_id;
        j["session"] = m.choices.session;
        ordered_json anomalies = ordered_json::array();
        for (int task = 1; task <= 6; ++task) {
            j["task" + std::to_string(task)] = m.choices.response(task);
            if (m.choices.length_anomaly[static_cast<std::size_t>(task - 1)]) anomalies.push_back(task);
        }
        j["anomalies"] = anomalies;
        j["demographics"] = m.demographics ? demographics_json(*m.demographics) : ordered_json();
        out += j.dump() + '\n';
    }
    return out;
}

Cohort import_canonical(std::string_view text) {
    std::vector<SubjectRecord> subjects;
    std::vector<DemographicRecord> demographics;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t number = i + 1;
        if (trim(lines[i]).empty()) continue;
        try {
            const auto j = ordered_json::parse(lines[i]);
            std::array<int, 6> responses{};
            for (int task = 1; task <= 6; ++task)
                responses[static_cast<std::size_t>(task - 1)] =
                    j.at("task" + std::to_string(task)).get<int>();
            auto rec = make_subject_record(j.at("subject").get<std::string>(), responses);
            for (int task = 1; task <= 6; ++task) interval_from_response(task_design(task), rec.response(task));
            rec.session = j.at("session").get<std::string>();
            for (const auto& t : j.at("anomalies")) {
                const int task = t.get<int>();
                if (task < 1 || task > 6) throw InvalidArgument("anomaly task outside 1..6");
                rec.length_anomaly[static_cast<std::size_t>(task - 1)] = true;
            }
            const auto& d = j.at("demographics");
            if (!d.is_null()) {
                std::array<std::optional<std::string>, kDemographicFieldCount> fields;
                for (std::size_t f = 0; f < fields.size(); ++f) {
                    const std::string key(1, field_letter(f));
                    if (d.contains(key)) fields[f] = d.at(key).get<std::string>();
                }
                demographics.push_back(demographic_from_fields(rec.subject_id, fields, number));
            }
            subjects.push_back(std::move(rec));
        } catch (const ValidationError&) {
            throw;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("line ") + std::to_string(number) + ": " + e.what(), number);
        } catch (const InvalidArgument& e) {
            throw ParseError(std::string("line ") + std::to_string(number) + ": " + e.what(), number);
        }
    }
    return Cohort(std::move(subjects), std::move(demographics));
}

MonotonicityReport validate_monotonicity(std::string_view subject_id,
                                         const std::array<std::string, 6>& raw) {
    MonotonicityReport report;
    report.subject_id = std::string(subject_id);
    for (int task = 1; task <= 6; ++task) {
        try {
            parse_choice_string(raw[static_cast<std::size_t>(task - 1)], task_design(task));
        } catch (const ParseError& e) {
            report.pass = false;
            report.problems.push_back("task " + std::to_string(task) + ": " + e.what());
        }
    }
    return report;
}

MonotonicityReport validate_monotonicity(const SubjectRecord& rec) {
    return validate_monotonicity(rec.subject_id, rec.raw);
}

CohortMonotonicity validate_monotonicity(const Cohort& cohort) {
    CohortMonotonicity out;
    for (const auto& m : cohort.members()) {
        ++out.subjects;
        out.length_anomalies += static_cast<std::size_t>(
            std::count(m.choices.length_anomaly.begin(), m.choices.length_anomaly.end(), true));
        auto report = validate_monotonicity(m.choices);
        if (report.pass)
            ++out.passed;
        else
            out.failures.push_back(std::move(report));
    }
    return out;
}

}  // namespace mplab
