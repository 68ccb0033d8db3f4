#pragma once

// Reproduction of the published test tables from a cohort: every published
// value next to the computed one, its delta and the tolerance it is held to.

#include <optional>
#include <string>
#include <vector>

#include "mplab/analysis.hpp"

namespace mplab {

enum class CheckStatus { PASS, FAIL, SKIPPED_CONDITIONAL };
std::string_view to_string(CheckStatus status);

enum class CheckKind {
    Near,     // |computed - published| <= tolerance
    AtMost,   // computed <= published + tolerance
};

struct CheckedValue {
    std::string quantity;     // "Task1 = Task6: z"
    double published = 0;
    double computed = 0;
    double tolerance = 0;     // 0 means exact
    CheckKind kind = CheckKind::Near;
    CheckStatus status = CheckStatus::PASS;

    double delta() const noexcept { return computed - published; }
};

struct ReproducedTable {
    std::string id;       // "wilcoxon", "sign", "ttest", "ce_rp", "rp_tests", "summary_ra", "summary_rp", "aggregates"
    std::string title;
    // Conditional tables depend on the CVU schedule the cohort was elicited with
    // and are only compared when an external schedule is supplied.
    bool conditional = false;
    std::vector<CheckedValue> values;
};

struct Reproduction {
    std::size_t subjects = 0;
    bool external_schedule = false;
    std::vector<ReproducedTable> tables;

    std::size_t count(CheckStatus status) const;
    bool all_within_tolerance() const { return count(CheckStatus::FAIL) == 0; }
    const ReproducedTable* find(std::string_view id) const;
};

// Throws InvalidArgument for an empty cohort. With no schedule, conditional
// values use the default CVU schedule and are reported SKIPPED_CONDITIONAL.
Reproduction reproduce_tables(const Cohort& cohort,
                              const std::optional<CvuSchedule>& cvu_schedule = std::nullopt);

// Aligned plain text, one block per table. Deterministic.
std::string to_text(const Reproduction& r);
// One JSON document with the same content. Deterministic.
std::string to_json(const Reproduction& r);

}  // namespace mplab
