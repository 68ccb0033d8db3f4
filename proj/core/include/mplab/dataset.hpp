#pragma once

// Session choice tables, coded questionnaire records and their join.
//
// Session table: one subject per line, tab- or comma-separated,
//   subject  task1 .. task6
// with an optional header row starting with "subject". Task cells hold printed
// choice strings (see choice_string.hpp); tasks 1 and 6 are HL, 2 and 5 CVU,
// 3 and 4 BINS.
//
// Demographics table: one subject per line, tab-separated,
//   subject  A .. U
// with the questionnaire codes documented on DemographicRecord.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mplab {

struct SubjectRecord {
    std::string subject_id;
    std::string session;                 // leading letters of the id ("A" for A12)
    std::array<int, 6> responses{};      // task 1..6: safe count or decision number
    std::array<std::string, 6> raw;      // choice strings as read
    std::array<bool, 6> length_anomaly{};

    int response(int task) const { return responses.at(static_cast<std::size_t>(task - 1)); }
    friend bool operator==(const SubjectRecord&, const SubjectRecord&) = default;
};

struct LoadWarning {
    std::size_t line = 0;
    std::string subject_id;
    int task = 0;
    std::string message;
};

struct SessionTable {
    std::vector<SubjectRecord> records;
    std::vector<LoadWarning> warnings;
};

// Throws ParseError naming the line for wrong column counts, duplicate
// subjects and malformed choice strings.
SessionTable load_session_table(std::string_view doc);

// Tab-separated table with a header row and canonical choice strings.
std::string write_session_table(const std::vector<SubjectRecord>& records);

// Builds a record from responses, rendering canonical choice strings.
SubjectRecord make_subject_record(std::string subject_id, const std::array<int, 6>& responses);

// Session prefix of a subject id: its leading letters.
std::string session_of(std::string_view subject_id);

// Questionnaire answers. Code ranges:
//   B gender 0..1, C race 0..6, D class 0..5, E college 0..6 or 8..12,
//   F major 0..4, H/I prior experiments 0..5, J marital 0..1,
//   M dependency 0..2, N family income 1..7 (0 = not reported),
//   O household size >= 1, T/U stated attitude 1..9; other numbers >= 0.
struct DemographicRecord {
    std::string subject_id;
    int birth_year = 0;               // A
    int gender = 0;                   // B
    int race = 0;                     // C
    int class_status = 0;             // D
    int college = 0;                  // E
    int major = 0;                    // F
    double credit_hours = 0;          // G
    int prior_experiments = 0;        // H
    int prior_risk_experiments = 0;   // I
    int marital_status = 0;           // J
    double hours_worked = 0;          // K
    double hourly_earnings = 0;       // L
    int financial_dependency = 0;     // M
    int family_income = 0;            // N
    int household_size = 0;          // O
    double height = 0;                // P (inches)
    double weight = 0;                // Q (pounds)
    std::string country;              // R
    std::string state;                // S
    int attitude_general = 0;         // T
    int attitude_lottery = 0;         // U

    friend bool operator==(const DemographicRecord&, const DemographicRecord&) = default;
};

inline constexpr std::size_t kDemographicFieldCount = 21;

// Parses and validates the 21 answers A..U (index 0 = A). A missing answer
// (nullopt or blank) or an out-of-range code throws ValidationError naming the
// field letter and `row`.
DemographicRecord demographic_from_fields(
    std::string subject_id,
    const std::array<std::optional<std::string>, kDemographicFieldCount>& fields,
    std::size_t row = 0);

// The 21 answers as text, in A..U order.
std::array<std::string, kDemographicFieldCount> demographic_fields(const DemographicRecord& rec);

// Throws ValidationError for an out-of-range code.
void validate_demographics(const DemographicRecord& rec, std::size_t row = 0);

// Throws ValidationError (field, row) or ParseError (duplicate subject).
std::vector<DemographicRecord> load_demographics(std::string_view doc);
std::string write_demographics(const std::vector<DemographicRecord>& records);

struct CohortMember {
    SubjectRecord choices;
    std::optional<DemographicRecord> demographics;

    friend bool operator==(const CohortMember&, const CohortMember&) = default;
};

class Cohort {
public:
    Cohort() = default;
    // Joins by subject id. Throws InvalidArgument for duplicate ids or
    // demographics without a matching choice record.
    Cohort(std::vector<SubjectRecord> subjects, std::vector<DemographicRecord> demographics);

    const std::vector<CohortMember>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    const CohortMember* find(std::string_view subject_id) const;

    // Subjects per session prefix, in first-seen order.
    std::vector<std::pair<std::string, std::size_t>> session_sizes() const;

    friend bool operator==(const Cohort&, const Cohort&) = default;

private:
    std::vector<CohortMember> members_;
};

struct CohortLoad {
    Cohort cohort;
    std::vector<LoadWarning> warnings;
};

// Reads every choices_<S>.tsv and its demographics_<S>.tsv (when present) in
// `dir`, sessions in name order.
CohortLoad load_cohort_dir(const std::filesystem::path& dir);

// One JSON object per line with fields in this order:
//   subject, session, task1..task6, anomalies (task numbers), demographics
//   (object with keys A..U, or null).
std::string export_canonical(const Cohort& cohort);
Cohort import_canonical(std::string_view text);

struct MonotonicityReport {
    std::string subject_id;
    bool pass = true;
    std::vector<std::string> problems;  // "task 2: safe choice 'C' after the switch marker"
};

// Re-checks each printed string: HL/CVU strings must be safe choices followed
// by risky ones, BINS strings must carry one decision marker.
MonotonicityReport validate_monotonicity(std::string_view subject_id,
                                         const std::array<std::string, 6>& raw);
MonotonicityReport validate_monotonicity(const SubjectRecord& rec);

struct CohortMonotonicity {
    std::size_t subjects = 0;
    std::size_t passed = 0;
    std::size_t length_anomalies = 0;
    std::vector<MonotonicityReport> failures;
};

CohortMonotonicity validate_monotonicity(const Cohort& cohort);

}  // namespace mplab
