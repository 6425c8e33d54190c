#pragma once

#include "semibandit/environment.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semibandit {

// One SVMlight-style line: `<relevance> qid:<token> (<index>:<value>)* (# <comment>)?`.
struct LetorRecord {
    int relevance = 0;
    std::string query_id;
    std::map<int, double> features;  // 1-based sparse indices
    std::optional<std::string> comment;

    bool operator==(const LetorRecord&) const = default;
};

// Carries the 1-based column of the offending token (and line when known).
struct LetorParseError : std::runtime_error {
    LetorParseError(const std::string& detail, std::size_t column, long line = 0);
    std::string detail;  // message without the position prefix
    std::size_t column;
    long line;
};

LetorRecord parse_letor_line(const std::string& line);
std::string serialize_letor(const LetorRecord& record);
// Parse errors from a file are rethrown with the 1-based line number filled in.
std::vector<LetorRecord> parse_letor_file(const std::string& path);

// A query-per-context replay problem: the first K documents of each query
// become the per-action feature rows, relevance/4 becomes y(a), and slot
// weights are all ones (so reward is the scaled sum of slot relevances).
struct ReplayBuild {
    EnvironmentSpec spec;
    std::vector<Context> contexts;
    std::vector<RewardFeatures> rewards;
    long dropped_queries = 0;  // queries with fewer than K documents
};

ReplayBuild build_replay_env(const std::vector<LetorRecord>& records, int K, int L);

}  // namespace semibandit
