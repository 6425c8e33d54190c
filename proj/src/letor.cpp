#include "semibandit/letor.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace semibandit {

LetorParseError::LetorParseError(const std::string& msg, std::size_t col, long ln)
    : std::runtime_error(ln > 0 ? "line " + std::to_string(ln) + ", column " +
                                      std::to_string(col) + ": " + msg
                                : "column " + std::to_string(col) + ": " + msg),
      detail(msg), column(col), line(ln) {}

namespace {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ') ++i;
        tokens.push_back({std::string_view(line).substr(start, i - start), start + 1});
    }
    return tokens;
}

int parse_int(std::string_view s, std::size_t column, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw LetorParseError(std::string("expected ") + what, column);
    return value;
}

double parse_double(std::string_view s, std::size_t column) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw LetorParseError("expected a numeric feature value", column);
    return value;
}

}  // namespace

LetorRecord parse_letor_line(const std::string& line) {
    const std::vector<Token> tokens = tokenize(line);
    if (tokens.empty()) throw LetorParseError("empty line", 1);

    LetorRecord record;
    record.relevance = parse_int(tokens[0].text, tokens[0].column, "a nonnegative integer relevance");
    if (record.relevance < 0)
        throw LetorParseError("relevance must be nonnegative", tokens[0].column);

    if (tokens.size() < 2 || !tokens[1].text.starts_with("qid:"))
        throw LetorParseError("missing qid:<token>",
                              tokens.size() < 2 ? line.size() + 1 : tokens[1].column);
    record.query_id = std::string(tokens[1].text.substr(4));
    if (record.query_id.empty()) throw LetorParseError("empty query id", tokens[1].column);

    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.text.starts_with("#")) {
            // Comment: everything after the '#' (and one optional space).
            std::size_t pos = tok.column - 1 + 1;  // index just past '#'
            if (pos < line.size() && line[pos] == ' ') ++pos;
            record.comment = line.substr(pos);
            break;
        }
        const std::size_t colon = tok.text.find(':');
        if (colon == std::string_view::npos)
            throw LetorParseError("expected <index>:<value>", tok.column);
        const int index = parse_int(tok.text.substr(0, colon), tok.column, "an integer feature index");
        if (index < 1) throw LetorParseError("feature indices start at 1", tok.column);
        const double value = parse_double(tok.text.substr(colon + 1), tok.column + colon + 1);
        record.features[index] = value;  // later duplicates overwrite
    }
    return record;
}

std::string serialize_letor(const LetorRecord& record) {
    std::ostringstream out;
    out << record.relevance << " qid:" << record.query_id;
    char buf[40];
    for (const auto& [index, value] : record.features) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        out << ' ' << index << ':' << buf;
    }
    if (record.comment) out << " # " << *record.comment;
    return out.str();
}

std::vector<LetorRecord> parse_letor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<LetorRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            records.push_back(parse_letor_line(line));
        } catch (const LetorParseError& e) {
            throw LetorParseError(e.detail, e.column, line_no);
        }
    }
    return records;
}

ReplayBuild build_replay_env(const std::vector<LetorRecord>& records, int K, int L) {
    if (K < 1 || L < 1 || L > K) throw std::invalid_argument("need 0 < L <= K");
    // Group documents by query in first-appearance order (single pass).
    std::vector<std::string> order;
    std::map<std::string, std::vector<const LetorRecord*>> by_query;
    int d = 0;
    for (const LetorRecord& r : records) {
        auto [it, fresh] = by_query.try_emplace(r.query_id);
        if (fresh) order.push_back(r.query_id);
        it->second.push_back(&r);
        if (!r.features.empty()) d = std::max(d, r.features.rbegin()->first);
    }
    d = std::max(d, 1);

    ReplayBuild build;
    build.spec.K = K;
    build.spec.L = L;
    build.spec.d = d;
    build.spec.kind = EnvironmentKind::LetorReplay;
    build.spec.weight = WeightVector::ones(L);

    std::int64_t next_id = 0;
    for (const std::string& qid : order) {
        const auto& docs = by_query[qid];
        if (static_cast<int>(docs.size()) < K) {
            ++build.dropped_queries;
            continue;
        }
        Context x;
        x.id = next_id++;
        x.K = K;
        x.d = d;
        x.features.assign(static_cast<size_t>(K) * d, 0.0);
        RewardFeatures y;
        y.values.resize(static_cast<size_t>(K));
        for (int a = 0; a < K; ++a) {
            const LetorRecord* doc = docs[static_cast<size_t>(a)];  // first K in file order
            for (const auto& [index, value] : doc->features)
                x.features[static_cast<size_t>(a) * d + (index - 1)] = value;
            y.values[static_cast<size_t>(a)] = doc->relevance / 4.0;
        }
        build.contexts.push_back(std::move(x));
        build.rewards.push_back(std::move(y));
    }
    return build;
}

}  // namespace semibandit
