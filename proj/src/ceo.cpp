#include "tcage/ceo.hpp"

#include "tcage/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

namespace tcage {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::size_t require_column(const std::vector<std::string>& header, const std::string& name, std::size_t line) {
    auto index = csv::find_column(header, name);
    if (!index) throw RowError(line, fmt::format("missing column '{}' in header", name));
    return *index;
}

const std::string& field_at(const csv::Row& row, std::size_t index) {
    if (index >= row.fields.size()) {
        throw RowError(row.line, fmt::format("expected at least {} fields, found {}", index + 1, row.fields.size()));
    }
    return row.fields[index];
}

Timestamp timestamp_field(const csv::Row& row, std::size_t index, std::string_view column) {
    const auto& text = field_at(row, index);
    auto parsed = parse_timestamp(text);
    if (!parsed) throw RowError(row.line, fmt::format("malformed {} '{}'", column, text));
    return *parsed;
}

std::string test_case_field(const csv::Row& row, std::size_t index) {
    const auto& name = field_at(row, index);
    if (name.empty()) throw RowError(row.line, "missing test_case");
    return name;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::string_view to_string(Outcome outcome) { return outcome == Outcome::Pass ? "PASS" : "FAIL"; }

std::vector<CreationRecord> parse_creations(std::istream& in, const CsvSchema& schema) {
    csv::Reader reader(in, schema.delimiter);
    std::vector<CreationRecord> out;
    auto header = reader.next();
    if (!header) return out;
    const auto name_col = require_column(header->fields, schema.test_case, header->line);
    const auto time_col = require_column(header->fields, schema.creation_time, header->line);

    std::set<std::string, std::less<>> seen;
    while (auto row = reader.next()) {
        CreationRecord record{test_case_field(*row, name_col), timestamp_field(*row, time_col, "creation_time")};
        if (!seen.insert(record.test_case).second) {
            throw DatasetError(fmt::format("duplicate test case '{}' in creations (line {})", record.test_case, row->line));
        }
        out.push_back(std::move(record));
    }
    return out;
}

std::vector<RawExecution> parse_executions(std::istream& in, const CsvSchema& schema) {
    csv::Reader reader(in, schema.delimiter);
    std::vector<RawExecution> out;
    auto header = reader.next();
    if (!header) return out;
    const auto name_col = require_column(header->fields, schema.test_case, header->line);
    const auto time_col = require_column(header->fields, schema.execution_time, header->line);
    const auto outcome_col = require_column(header->fields, schema.outcome, header->line);
    const auto session_col = csv::find_column(header->fields, schema.session_start);

    while (auto row = reader.next()) {
        RawExecution raw;
        raw.line = row->line;
        raw.test_case = test_case_field(*row, name_col);
        raw.execution_time = timestamp_field(*row, time_col, "execution_time");
        raw.outcome = field_at(*row, outcome_col);
        if (session_col && *session_col < row->fields.size() && !row->fields[*session_col].empty()) {
            raw.session_start = timestamp_field(*row, *session_col, "session_start");
        }
        out.push_back(std::move(raw));
    }
    return out;
}

void write_creations(std::ostream& out, std::span<const CreationRecord> creations) {
    out << "test_case,creation_time\n";
    for (const auto& c : creations) {
        out << csv::escape(c.test_case) << ',' << format_timestamp(c.creation_time) << '\n';
    }
}

void write_executions(std::ostream& out, std::span<const ExecutionRecord> executions) {
    out << "test_case,execution_time,outcome,session_start\n";
    for (const auto& e : executions) {
        out << csv::escape(e.test_case) << ',' << format_timestamp(e.execution_time) << ',' << to_string(e.outcome)
            << ',';
        if (e.session_start) out << format_timestamp(*e.session_start);
        out << '\n';
    }
}

OutcomeMapPolicy::OutcomeMapPolicy() {
    table_["pass"] = OutcomeMapping::Pass;
    table_["fail"] = OutcomeMapping::Fail;
    table_["failed"] = OutcomeMapping::Fail;
}

void OutcomeMapPolicy::set(std::string_view label, OutcomeMapping mapping) { table_[lowercase(trim(label))] = mapping; }

OutcomeMapping OutcomeMapPolicy::lookup(std::string_view label) const {
    auto it = table_.find(lowercase(trim(label)));
    return it == table_.end() ? OutcomeMapping::Drop : it->second;
}

void OutcomeMapPolicy::apply_entry(std::string_view entry) {
    const auto eq = entry.rfind('=');
    if (eq == std::string_view::npos) throw Error(fmt::format("outcome mapping '{}' is not label=PASS|FAIL|DROP", entry));
    const auto label = trim(entry.substr(0, eq));
    const auto target = lowercase(trim(entry.substr(eq + 1)));
    if (label.empty()) throw Error(fmt::format("outcome mapping '{}' has an empty label", entry));
    if (target == "pass") {
        set(label, OutcomeMapping::Pass);
    } else if (target == "fail") {
        set(label, OutcomeMapping::Fail);
    } else if (target == "drop") {
        set(label, OutcomeMapping::Drop);
    } else {
        throw Error(fmt::format("outcome mapping '{}' must target PASS, FAIL or DROP", entry));
    }
}

void OutcomeMapPolicy::load(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto entry = trim(line);
        if (!entry.empty()) apply_entry(entry);
    }
}

MappedExecutions map_outcomes(std::span<const RawExecution> rows, const OutcomeMapPolicy& policy) {
    MappedExecutions out;
    out.records.reserve(rows.size());
    for (const auto& row : rows) {
        switch (policy.lookup(row.outcome)) {
        case OutcomeMapping::Pass:
            out.records.push_back({row.test_case, row.execution_time, Outcome::Pass, row.session_start});
            break;
        case OutcomeMapping::Fail:
            out.records.push_back({row.test_case, row.execution_time, Outcome::Fail, row.session_start});
            break;
        case OutcomeMapping::Drop:
            ++out.drop_count;
            break;
        }
    }
    return out;
}

std::optional<InferMode> parse_infer_mode(std::string_view text) {
    if (text == "strict") return InferMode::Strict;
    if (text == "infer-missing") return InferMode::InferMissing;
    if (text == "infer-all") return InferMode::InferAll;
    return std::nullopt;
}

std::string_view to_string(InferMode mode) {
    switch (mode) {
    case InferMode::Strict: return "strict";
    case InferMode::InferMissing: return "infer-missing";
    case InferMode::InferAll: return "infer-all";
    }
    return "?";
}

std::vector<CreationRecord> infer_creations(std::span<const ExecutionRecord> executions,
                                            std::span<const CreationRecord> creations, InferMode mode) {
    std::map<std::string, Timestamp, std::less<>> first_run;
    for (const auto& e : executions) {
        auto [it, inserted] = first_run.try_emplace(e.test_case, e.execution_time);
        if (!inserted && e.execution_time < it->second) it->second = e.execution_time;
    }

    std::vector<CreationRecord> out;
    std::set<std::string, std::less<>> known;
    for (const auto& c : creations) {
        known.insert(c.test_case);
        auto run = first_run.find(c.test_case);
        if (mode == InferMode::InferAll && run != first_run.end()) {
            out.push_back({c.test_case, run->second});
        } else {
            out.push_back(c);
        }
    }
    for (const auto& [name, time] : first_run) {
        if (known.contains(name)) continue;
        if (mode == InferMode::Strict) {
            throw DatasetError(fmt::format("test case '{}' has executions but no creation record", name));
        }
        out.push_back({name, time});
    }
    return out;
}

CeoDataset::CeoDataset(std::vector<CreationRecord> creations, std::vector<ExecutionRecord> executions,
                       std::chrono::seconds time_step)
    : creations_(std::move(creations)), executions_(std::move(executions)), time_step_(time_step) {
    if (executions_.empty()) throw DatasetError("no executions");
    if (time_step_.count() <= 0) throw DatasetError("time step must be positive");
    for (const auto& c : creations_) creation_index_.emplace(c.test_case, c.creation_time);
    auto [lo, hi] = std::minmax_element(executions_.begin(), executions_.end(), [](const auto& a, const auto& b) {
        return a.execution_time < b.execution_time;
    });
    t1_ = lo->execution_time;
    tM_ = hi->execution_time;
}

std::int64_t CeoDataset::day_of(Timestamp t) const {
    const auto step = time_step_.count();
    return floor_div(t.time_since_epoch().count(), step) - floor_div(t1_.time_since_epoch().count(), step);
}

std::optional<Timestamp> CeoDataset::creation_of(std::string_view test_case) const {
    auto it = creation_index_.find(test_case);
    if (it == creation_index_.end()) return std::nullopt;
    return it->second;
}

CeoDataset validate_dataset(std::vector<CreationRecord> creations, std::vector<ExecutionRecord> executions,
                            Diagnostics* diagnostics, std::chrono::seconds time_step) {
    std::unordered_map<std::string, Timestamp> created;
    for (const auto& c : creations) {
        if (!created.emplace(c.test_case, c.creation_time).second) {
            throw DatasetError(fmt::format("duplicate test case '{}' in creations", c.test_case));
        }
    }

    std::vector<ExecutionRecord> kept;
    kept.reserve(executions.size());
    for (auto& e : executions) {
        auto it = created.find(e.test_case);
        if (it == created.end()) {
            throw DatasetError(fmt::format("execution references unknown test case '{}'", e.test_case));
        }
        if (e.execution_time < it->second) {
            if (diagnostics) {
                ++diagnostics->rejected_before_creation;
                diagnostics->warn(fmt::format("execution of '{}' at {} predates its creation at {}; rejected",
                                              e.test_case, format_timestamp(e.execution_time),
                                              format_timestamp(it->second)));
            }
            continue;
        }
        kept.push_back(std::move(e));
    }

    std::sort(kept.begin(), kept.end());
    auto last = std::unique(kept.begin(), kept.end());
    if (last != kept.end()) {
        const auto removed = static_cast<std::size_t>(std::distance(last, kept.end()));
        if (diagnostics) {
            diagnostics->duplicates_removed += removed;
            diagnostics->warn(fmt::format("{} exact duplicate execution row(s) removed", removed));
        }
        kept.erase(last, kept.end());
    }
    if (kept.empty()) throw DatasetError("no executions");
    return CeoDataset(std::move(creations), std::move(kept), time_step);
}

SessionFilterResult filter_allfail_sessions(const CeoDataset& dataset, std::size_t min_session_size) {
    struct Tally {
        std::size_t total = 0;
        std::size_t failed = 0;
    };
    std::map<Timestamp, Tally> sessions;
    for (const auto& e : dataset.executions()) {
        if (!e.session_start) continue;
        auto& t = sessions[*e.session_start];
        ++t.total;
        if (e.outcome == Outcome::Fail) ++t.failed;
    }

    std::set<Timestamp> doomed;
    for (const auto& [start, tally] : sessions) {
        if (tally.total >= min_session_size && tally.failed == tally.total) doomed.insert(start);
    }

    std::vector<ExecutionRecord> kept;
    kept.reserve(dataset.executions().size());
    for (const auto& e : dataset.executions()) {
        if (e.session_start && doomed.contains(*e.session_start)) continue;
        kept.push_back(e);
    }
    const std::size_t removed = dataset.executions().size() - kept.size();
    if (kept.empty()) throw DatasetError("no executions remain after removing all-fail sessions");
    return SessionFilterResult{CeoDataset(dataset.creations(), std::move(kept), dataset.time_step()), doomed.size(),
                               removed};
}

}  // namespace tcage
