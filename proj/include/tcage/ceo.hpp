#pragma once

#include "tcage/error.hpp"
#include "tcage/time.hpp"

#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace tcage {

enum class Outcome { Pass, Fail };

std::string_view to_string(Outcome outcome);

struct CreationRecord {
    std::string test_case;
    Timestamp creation_time;

    friend bool operator==(const CreationRecord&, const CreationRecord&) = default;
};

/// Execution row as read from disk, before outcome mapping.
struct RawExecution {
    std::string test_case;
    Timestamp execution_time;
    std::string outcome;
    std::optional<Timestamp> session_start;
    std::size_t line = 0;
};

struct ExecutionRecord {
    std::string test_case;
    Timestamp execution_time;
    Outcome outcome = Outcome::Pass;
    std::optional<Timestamp> session_start;

    friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
    friend auto operator<=>(const ExecutionRecord& a, const ExecutionRecord& b) {
        return std::tie(a.test_case, a.execution_time, a.outcome, a.session_start) <=>
               std::tie(b.test_case, b.execution_time, b.outcome, b.session_start);
    }
};

/// Column names and delimiter of the two CSV inputs.
struct CsvSchema {
    char delimiter = ',';
    std::string test_case = "test_case";
    std::string creation_time = "creation_time";
    std::string execution_time = "execution_time";
    std::string outcome = "outcome";
    std::string session_start = "session_start";
};

std::vector<CreationRecord> parse_creations(std::istream& in, const CsvSchema& schema = {});
std::vector<RawExecution> parse_executions(std::istream& in, const CsvSchema& schema = {});

void write_creations(std::ostream& out, std::span<const CreationRecord> creations);
void write_executions(std::ostream& out, std::span<const ExecutionRecord> executions);

enum class OutcomeMapping { Pass, Fail, Drop };

/// Case-insensitive raw label -> PASS/FAIL/DROP table. Unknown labels drop.
class OutcomeMapPolicy {
public:
    /// pass -> PASS, fail/failed -> FAIL
    OutcomeMapPolicy();

    void set(std::string_view label, OutcomeMapping mapping);
    OutcomeMapping lookup(std::string_view label) const;

    /// Applies one `raw_label=PASS|FAIL|DROP` entry.
    void apply_entry(std::string_view entry);
    /// One entry per line; blank lines and `#` comments are ignored.
    void load(std::istream& in);

    const std::map<std::string, OutcomeMapping>& entries() const { return table_; }

private:
    std::map<std::string, OutcomeMapping> table_;
};

struct MappedExecutions {
    std::vector<ExecutionRecord> records;
    std::size_t drop_count = 0;
};

MappedExecutions map_outcomes(std::span<const RawExecution> rows, const OutcomeMapPolicy& policy = {});

enum class InferMode { Strict, InferMissing, InferAll };

std::optional<InferMode> parse_infer_mode(std::string_view text);
std::string_view to_string(InferMode mode);

/// Ensures every executed test case has one creation record. Inferred creation
/// times are the earliest execution of that test case.
std::vector<CreationRecord> infer_creations(std::span<const ExecutionRecord> executions,
                                            std::span<const CreationRecord> creations, InferMode mode);

struct SessionFilterResult;

/// Validated, immutable Creation-Execution-Outcome tables.
///
/// Executions are sorted by (test_case, execution_time), every execution refers
/// to a known test case and none precedes its creation. Day indices count whole
/// time steps from the step containing the earliest execution (day 0).
class CeoDataset {
public:
    const std::vector<CreationRecord>& creations() const { return creations_; }
    const std::vector<ExecutionRecord>& executions() const { return executions_; }
    Timestamp t1() const { return t1_; }
    Timestamp tM() const { return tM_; }
    std::chrono::seconds time_step() const { return time_step_; }

    std::int64_t day_of(Timestamp t) const;
    std::int64_t tM_day() const { return day_of(tM_); }
    std::optional<Timestamp> creation_of(std::string_view test_case) const;

private:
    friend CeoDataset validate_dataset(std::vector<CreationRecord>, std::vector<ExecutionRecord>, Diagnostics*,
                                       std::chrono::seconds);
    friend SessionFilterResult filter_allfail_sessions(const CeoDataset&, std::size_t);

    CeoDataset(std::vector<CreationRecord> creations, std::vector<ExecutionRecord> executions,
               std::chrono::seconds time_step);

    std::vector<CreationRecord> creations_;
    std::vector<ExecutionRecord> executions_;
    std::map<std::string, Timestamp, std::less<>> creation_index_;
    Timestamp t1_{};
    Timestamp tM_{};
    std::chrono::seconds time_step_{86400};
};

/// Enforces referential integrity, rejects executions that predate their
/// creation, removes exact duplicate executions and sorts. Throws DatasetError
/// on duplicate creations, unknown test cases or an empty execution table.
CeoDataset validate_dataset(std::vector<CreationRecord> creations, std::vector<ExecutionRecord> executions,
                            Diagnostics* diagnostics = nullptr,
                            std::chrono::seconds time_step = std::chrono::seconds{86400});

struct SessionFilterResult {
    CeoDataset dataset;
    std::size_t removed_sessions = 0;
    std::size_t removed_executions = 0;
};

/// Drops every session with at least `min_session_size` executions that all
/// failed. Executions without a session label are never removed.
SessionFilterResult filter_allfail_sessions(const CeoDataset& dataset, std::size_t min_session_size = 2);

}  // namespace tcage
