#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>
#include <random>

#include "../support/session_driver.hpp"
#include "mplab/service.hpp"

using namespace mplab;
using json = nlohmann::json;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("mplab_service_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::unique_ptr<Service> make(DieMode mode = DieMode::SEEDED_RNG, std::optional<std::size_t> capacity = {}) {
        ServiceConfig c;
        c.data_dir = dir_;
        c.seed = 11;
        c.die_mode = mode;
        c.capacity = capacity;
        c.content_file = MPLAB_CONTENT_DIR "/messages.json";
        return std::make_unique<Service>(c);
    }

    static Response call(Service& s, const std::string& method, const std::string& path,
                         const std::string& token = "", const json& body = nullptr,
                         std::map<std::string, std::string> headers = {}) {
        Request r;
        r.method = method;
        const auto q = path.find('?');
        r.path = path.substr(0, q);
        if (q != std::string::npos) {
            const auto kv = path.substr(q + 1);
            const auto eq = kv.find('=');
            r.query[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        if (!token.empty()) headers["authorization"] = "Bearer " + token;
        r.headers = std::move(headers);
        if (!body.is_null()) r.body = body.dump();
        return s.handle(r);
    }

    struct Subject {
        std::string id, token;
    };

    static Subject create(Service& s, const std::string& subject) {
        const auto r = call(s, "POST", "/sessions", "", {{"subject_id", subject}});
        EXPECT_EQ(r.status, 201) << r.body;
        const auto j = json::parse(r.body);
        return {j["session_id"], j["token"]};
    }

    // Answers every task through the API with safe counts / decisions `resp`.
    static void answer_all(Service& s, const Subject& sub, const std::array<int, 6>& resp,
                           std::vector<std::string>* bodies = nullptr) {
        for (int k = 0; k < 6; ++k) {
            const auto screen = call(s, "GET", "/sessions/" + sub.id + "/task", sub.token);
            ASSERT_EQ(screen.status, 200) << screen.body;
            if (bodies) bodies->push_back(screen.body);
            const auto j = json::parse(screen.body);
            const int task = j["task"];
            const int r = resp[static_cast<std::size_t>(task - 1)];
            if (j["design"] == "BINS") {
                const auto a = call(s, "POST", "/sessions/" + sub.id + "/choices", sub.token,
                                    {{"task", task}, {"decision", r < 1 ? 1 : r}});
                ASSERT_EQ(a.status, 200) << a.body;
                if (bodies) bodies->push_back(a.body);
            } else {
                for (int row = 1; row <= 10; ++row) {
                    const auto a = call(s, "POST", "/sessions/" + sub.id + "/choices", sub.token,
                                        {{"task", task}, {"row", row}, {"option", row <= r ? "A" : "B"}});
                    ASSERT_EQ(a.status, 200) << a.body;
                    if (bodies) bodies->push_back(a.body);
                }
            }
        }
    }

    static json answers_json() {
        const auto fields = demographic_fields(test_support::sample_answers("x"));
        json a = json::object();
        for (std::size_t i = 0; i < fields.size(); ++i) a[std::string(1, static_cast<char>('A' + i))] = fields[i];
        return {{"answers", a}};
    }

    std::filesystem::path dir_;
};

}  // namespace

TEST_F(ServiceTest, HealthAndContent) {
    auto s = make();
    EXPECT_EQ(call(*s, "GET", "/health").status, 200);
    const auto m = json::parse(call(*s, "GET", "/content/messages").body);
    EXPECT_TRUE(m["errors"].contains("irrational_switch"));
    EXPECT_EQ(call(*s, "GET", "/nope").status, 404);
}

TEST_F(ServiceTest, CreateDuplicateAndClosedRun) {
    auto s = make();
    create(*s, "S1");
    EXPECT_EQ(call(*s, "POST", "/sessions", "", {{"subject_id", "S1"}}).status, 409);
    EXPECT_EQ(call(*s, "POST", "/sessions", "", {{"subject_id", "bad id!"}}).status, 400);
    EXPECT_EQ(call(*s, "POST", "/sessions", "", json::parse("{}")).status, 400);
    Request garbage{"POST", "/sessions", {}, {}, "{not json"};
    EXPECT_EQ(s->handle(garbage).status, 400);
    EXPECT_EQ(call(*s, "POST", "/runs/current/close", s->experimenter_token()).status, 200);
    const auto closed = call(*s, "POST", "/sessions", "", {{"subject_id", "S2"}});
    EXPECT_EQ(closed.status, 403);
    EXPECT_EQ(json::parse(closed.body)["error"], "run_closed");
}

TEST_F(ServiceTest, AuthorizationRoles) {
    auto s = make();
    const auto a = create(*s, "S1");
    const auto b = create(*s, "S2");
    EXPECT_EQ(call(*s, "GET", "/sessions/" + a.id).status, 401);
    EXPECT_EQ(call(*s, "GET", "/sessions/" + a.id, "wrong").status, 401);
    EXPECT_EQ(call(*s, "GET", "/sessions/" + a.id, b.token).status, 403);
    EXPECT_EQ(call(*s, "GET", "/runs/current", a.token).status, 403);
    EXPECT_EQ(call(*s, "GET", "/sessions/" + a.id + "/events", a.token).status, 403);
    EXPECT_EQ(call(*s, "GET", "/sessions/" + a.id, s->experimenter_token()).status, 200);
    EXPECT_EQ(call(*s, "GET", "/sessions/ffff", s->experimenter_token()).status, 404);
}

TEST_F(ServiceTest, TaskScreensCarryTenRowsAndPriceFraming) {
    auto s = make();
    const auto sub = create(*s, "S1");
    EXPECT_EQ(call(*s, "GET", "/sessions/" + sub.id + "/task", sub.token).status, 409);
    ASSERT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/begin", sub.token).status, 200);
    std::vector<std::string> bodies;
    answer_all(*s, sub, {5, 5, 5, 5, 5, 5}, &bodies);
    int screens = 0;
    for (const auto& b : bodies) {
        const auto j = json::parse(b);
        if (!j.contains("rows")) continue;
        ++screens;
        EXPECT_EQ(j["rows"].size(), 10u);
        if (j["domain"] == "PRICE") {
            EXPECT_DOUBLE_EQ(j["endowment"].get<double>(), 15.0);
            EXPECT_NE(j["text"].get<std::string>().find("15.00"), std::string::npos);
            EXPECT_TRUE(j["rows"][0]["a"].contains("prices"));
        } else {
            EXPECT_TRUE(j["rows"][0]["a"].contains("outcomes"));
        }
    }
    EXPECT_EQ(screens, 6);
}

TEST_F(ServiceTest, IrrationalSwitchIs422AndIdempotencyReplays) {
    auto s = make();
    const auto sub = create(*s, "S1");
    call(*s, "POST", "/sessions/" + sub.id + "/begin", sub.token);
    auto screen = json::parse(call(*s, "GET", "/sessions/" + sub.id + "/task", sub.token).body);
    int task = screen["task"];
    if (screen["design"] == "BINS") {
        call(*s, "POST", "/sessions/" + sub.id + "/choices", sub.token, {{"task", task}, {"decision", 3}});
        task = json::parse(call(*s, "GET", "/sessions/" + sub.id + "/task", sub.token).body)["task"];
    }
    const auto path = "/sessions/" + sub.id + "/choices";
    const auto first = call(*s, "POST", path, sub.token, {{"task", task}, {"row", 1}, {"option", "B"}},
                            {{"idempotency-key", "k1"}});
    EXPECT_EQ(first.status, 200);
    const auto again = call(*s, "POST", path, sub.token, {{"task", task}, {"row", 1}, {"option", "B"}},
                            {{"idempotency-key", "k1"}});
    EXPECT_EQ(again.status, 200);
    EXPECT_EQ(again.body, first.body);
    const auto dup = call(*s, "POST", path, sub.token, {{"task", task}, {"row", 1}, {"option", "B"}});
    EXPECT_EQ(dup.status, 409);

    const auto bad = call(*s, "POST", path, sub.token, {{"task", task}, {"row", 2}, {"option", "A"}});
    EXPECT_EQ(bad.status, 422);
    const auto j = json::parse(bad.body);
    EXPECT_EQ(j["error"], "irrational_switch");
    EXPECT_EQ(j["row"], 2);
    EXPECT_NE(j["message"].get<std::string>().find("not economically rational"), std::string::npos);

    const auto dash = json::parse(call(*s, "GET", "/runs/current", s->experimenter_token()).body);
    EXPECT_EQ(dash["sessions"][0]["irrational_switch_attempts"], 1);
}

TEST_F(ServiceTest, NoPayoffVisibleBeforeReveal) {
    auto s = make();
    const auto sub = create(*s, "S1");
    std::vector<std::string> bodies;
    auto crawl = [&] {
        for (const char* p : {"", "/task", "/payout"}) bodies.push_back(call(*s, "GET", "/sessions/" + sub.id + p, sub.token).body);
    };
    crawl();
    bodies.push_back(call(*s, "POST", "/sessions/" + sub.id + "/begin", sub.token).body);
    crawl();
    answer_all(*s, sub, {4, 6, 3, 7, 5, 2}, &bodies);
    crawl();
    const auto bad_q = call(*s, "POST", "/sessions/" + sub.id + "/questionnaire", sub.token,
                            {{"answers", {{"A", "1999"}}}});
    EXPECT_EQ(bad_q.status, 422);
    EXPECT_EQ(json::parse(bad_q.body)["field"], "B");
    bodies.push_back(bad_q.body);
    bodies.push_back(call(*s, "POST", "/sessions/" + sub.id + "/questionnaire", sub.token, answers_json()).body);
    crawl();
    for (const auto& b : bodies) {
        EXPECT_EQ(b.find("payout"), std::string::npos) << b;
        EXPECT_EQ(b.find("rolls"), std::string::npos) << b;
        EXPECT_EQ(b.find("realized"), std::string::npos) << b;
    }
    const auto reveal = call(*s, "POST", "/sessions/" + sub.id + "/reveal", sub.token);
    ASSERT_EQ(reveal.status, 200) << reveal.body;
    const auto j = json::parse(reveal.body);
    EXPECT_EQ(j["stage"], "paid");
    EXPECT_TRUE(j.contains("rolls"));
    EXPECT_GE(j["payout"]["total"].get<double>(), 5.60);
    EXPECT_EQ(call(*s, "GET", "/sessions/" + sub.id + "/payout", sub.token).status, 200);
}

TEST_F(ServiceTest, DashboardAndExport) {
    auto s = make();
    const auto& tok = s->experimenter_token();
    auto dash = json::parse(call(*s, "GET", "/runs/current", tok).body);
    EXPECT_EQ(dash["session_count"], 0);
    EXPECT_EQ(dash["closed"], false);
    const int n = 3;
    for (int i = 0; i < n; ++i) {
        const auto sub = create(*s, "P" + std::to_string(i));
        call(*s, "POST", "/sessions/" + sub.id + "/begin", sub.token);
        answer_all(*s, sub, {i, 5, 4, 6, 5, 5});
        ASSERT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/questionnaire", sub.token, answers_json()).status, 200);
        ASSERT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/reveal", sub.token).status, 200);
    }
    create(*s, "unpaid");
    dash = json::parse(call(*s, "GET", "/runs/current", tok).body);
    EXPECT_EQ(dash["session_count"], n + 1);
    const auto ex = json::parse(call(*s, "GET", "/runs/current/export", tok).body);
    EXPECT_EQ(ex["records"], n);
    const auto table = load_session_table(call(*s, "GET", "/runs/current/export?file=choices", tok).body);
    EXPECT_EQ(table.records.size(), static_cast<std::size_t>(n));
    const auto demo = load_demographics(call(*s, "GET", "/runs/current/export?file=demographics", tok).body);
    EXPECT_EQ(demo.size(), static_cast<std::size_t>(n));
}

TEST_F(ServiceTest, ManualRollsValidatedAndPersistedSessionsRestore) {
    std::string id, token;
    std::string digest_body;
    {
        auto s = make(DieMode::MANUAL_ENTRY);
        const auto sub = create(*s, "M1");
        id = sub.id;
        token = sub.token;
        call(*s, "POST", "/sessions/" + sub.id + "/begin", sub.token);
        answer_all(*s, sub, {5, 5, 5, 5, 5, 5});
        call(*s, "POST", "/sessions/" + sub.id + "/questionnaire", sub.token, answers_json());
        EXPECT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/reveal", sub.token).status, 409);
        const auto& tok = s->experimenter_token();
        EXPECT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/rolls", sub.token,
                       {{"task", 1}, {"row", 1}, {"outcome", 1}}).status, 403);
        EXPECT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/rolls", tok,
                       {{"task", 7}, {"row", 1}, {"outcome", 1}}).status, 422);
        EXPECT_EQ(call(*s, "POST", "/sessions/" + sub.id + "/rolls", tok,
                       {{"task", 1}, {"row", 11}, {"outcome", 1}}).status, 422);
        const auto ok = call(*s, "POST", "/sessions/" + sub.id + "/rolls", tok,
                             {{"task", 1}, {"row", 2}, {"outcome", 1}});
        ASSERT_EQ(ok.status, 200) << ok.body;
        digest_body = call(*s, "GET", "/sessions/" + sub.id + "/payout", sub.token).body;
    }
    auto restored = make(DieMode::MANUAL_ENTRY);
    EXPECT_EQ(call(*restored, "GET", "/sessions/" + id + "/payout", token).body, digest_body);
    EXPECT_EQ(call(*restored, "POST", "/sessions", "", {{"subject_id", "M1"}}).status, 409);
}
