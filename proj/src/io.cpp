#include "abtrust/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace abtrust {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

long long parse_ll(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": invalid integer '" + s + "'");
    }
}

double parse_d(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": invalid number '" + s + "'");
    }
}

}  // namespace

TrustMatrix load_trust_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trust matrix file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trust matrix file '" + path + "' is empty");

    struct Entry {
        long long rater, ratee;
        double score;
    };
    std::vector<Entry> entries;
    long long max_id = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected rater,ratee,score");
        const std::string context = path + ":" + std::to_string(line_no);
        Entry e{parse_ll(fields[0], context + " rater"), parse_ll(fields[1], context + " ratee"),
                parse_d(fields[2], context + " score")};
        if (e.rater < 0 || e.ratee < 0)
            throw std::runtime_error(context + ": peer ids must be nonnegative");
        max_id = std::max({max_id, e.rater, e.ratee});
        entries.push_back(e);
    }
    if (entries.empty()) throw std::runtime_error("trust matrix file '" + path + "' has no entries");

    TrustMatrix trust(static_cast<Index>(max_id + 1));
    for (const Entry& e : entries)
        trust.set(static_cast<Index>(e.rater), static_cast<Index>(e.ratee), e.score);
    return trust;
}

void save_trust_matrix_csv(const TrustMatrix& trust, const std::string& path) {
    std::string out = "rater,ratee,score\n";
    const SparseMatrix& m = trust.matrix();
    for (Index ratee = 0; ratee < trust.size(); ++ratee)
        for (SparseMatrix::InnerIterator it(m, ratee); it; ++it)
            out += std::to_string(it.row()) + "," + std::to_string(ratee) + "," +
                   format_double(it.value()) + "\n";
    write_text_file(path, out);
}

std::string results_csv(std::span<const SweepRow> rows) {
    std::string out =
        "scenario_value,algorithm,mean_authentic_pct,stderr_authentic_pct,mean_load_stddev,"
        "feedback_messages,trust_read_messages,seed_base,trials\n";
    for (const SweepRow& r : rows) {
        out += format_double(r.scenario_value_pct) + "," + to_string(r.algorithm) + "," +
               format_double(r.mean_authentic_pct) + "," + format_double(r.stderr_authentic_pct) +
               "," + format_double(r.mean_load_stddev) + "," +
               format_double(r.mean_feedback_messages) + "," +
               format_double(r.mean_trust_read_messages) + "," + std::to_string(r.seed_base) + "," +
               std::to_string(r.trials) + "\n";
    }
    return out;
}

std::string residuals_csv(std::span<const ConvergenceRow> rows) {
    std::string out = "alpha,p,q,iteration,residual\n";
    for (const ConvergenceRow& r : rows)
        for (std::size_t k = 0; k < r.trace.size(); ++k)
            out += format_double(r.alpha) + "," + std::to_string(r.p) + "," + std::to_string(r.q) +
                   "," + std::to_string(k + 1) + "," + format_double(r.trace[k]) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace abtrust
