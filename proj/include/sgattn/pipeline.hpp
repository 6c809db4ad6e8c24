#pragma once

#include "sgattn/distance.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sgattn {

// Corpus-scale drivers behind the CLI subcommands. Every driver reads its
// whole input, processes lines with a worker pool (`jobs` threads, shared
// state is immutable) and emits results in input order, so output bytes do
// not depend on the job count. Per-line failures are reported to
// `diagnostics` with their 1-based line numbers; processing continues and
// the exit status is nonzero when anything failed.

struct DistanceOptions {
    std::string input_path;
    std::string output_path = "-"; // "-" = stdout
    std::string subword_path;      // one line per sentence; empty = no subwords
    bool doc_mode = false;         // join all sentences into one record
    std::int32_t sentinel = kSentenceSentinel;
    unsigned jobs = 1;
};

struct MaskOptions {
    std::string input_path; // JSON-lines records with a "distance" field
    std::string output_path;
    bool soft = false;
    double tau = 10.0;
    unsigned jobs = 1;
};

struct AttendOptions {
    std::string mask_path;
    std::size_t n = 0;
    std::size_t d_model = 0;
    std::size_t num_heads = 0;
    std::size_t grammar_heads = 0;
    std::uint64_t seed = 0;
    bool gradcheck = false;
};

struct CheckOptions {
    std::string input_path;
    unsigned jobs = 1;
};

int run_distance(const DistanceOptions& options, std::ostream& diagnostics);
int run_mask(const MaskOptions& options, std::ostream& diagnostics);
int run_attend(const AttendOptions& options, std::ostream& out, std::ostream& diagnostics);
int run_check(const CheckOptions& options, std::ostream& out);

} // namespace sgattn
