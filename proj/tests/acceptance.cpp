// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exit status is nonzero when any
// criterion fails. The pipeline criteria drive the actual CLI binary; pass
// its location with --cli (ctest wires this up automatically).

#include "sgattn/attention.hpp"
#include "sgattn/distance.hpp"
#include "sgattn/local_range.hpp"
#include "sgattn/mask_io.hpp"
#include "sgattn/soft_mask.hpp"
#include "sgattn/tree.hpp"

#include "reference_layer.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using namespace sgattn;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Matrix mask_to_matrix(const LocalRangeMask& mask) {
    Matrix m(mask.size(), mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        for (std::size_t j = 0; j < mask.size(); ++j)
            m(i, j) = mask.at(i, j) ? 1.0 : 0.0;
    return m;
}

Matrix soft_to_matrix(const SoftMask& mask) {
    Matrix m(mask.size(), mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        for (std::size_t j = 0; j < mask.size(); ++j)
            m(i, j) = mask.at(i, j);
    return m;
}

Matrix seeded_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols) {
    std::mt19937_64 rng(seed);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return m;
}

// --- criterion 1 & 2: random-tree sweep ------------------------------------

Outcome criterion_keystone() {
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    std::size_t trees = 0;
    for (int i = 0; i < 1000; ++i) {
        const ConstituencyTree tree = random_tree(1 + i % 30, static_cast<std::uint64_t>(i));
        const LocalRangeMask induced = induce_from_distances(generate_distances(tree));
        const LocalRangeMask derived = range_from_tree(tree);
        if (!masks_equal(induced, derived)) {
            outcome.fail("mismatch on tree seed " + std::to_string(i));
            return outcome;
        }
        ++trees;
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 5.0)
        outcome.fail("took " + fmt(elapsed) + "s (expected < 5s)");
    outcome.detail = std::to_string(trees) + "/1000 trees equal in " + fmt(elapsed) + "s";
    return outcome;
}

Outcome criterion_sign_property() {
    Outcome outcome;
    std::size_t trees = 0;
    for (int i = 0; i < 1000; ++i) {
        const ConstituencyTree tree = random_tree(1 + i % 30, static_cast<std::uint64_t>(i));
        if (!verify_sign_property(tree, generate_distances(tree))) {
            outcome.fail("violation on tree seed " + std::to_string(i));
            return outcome;
        }
        ++trees;
    }
    outcome.detail = std::to_string(trees) + "/1000 trees exact";
    return outcome;
}

// --- criterion 3: worked example --------------------------------------------

Outcome criterion_worked_example() {
    Outcome outcome;
    const ConstituencyTree tree = parse_ptb(
        "(S (NP (PRP I)) (VP (VBP swim) (PP (IN across) (NP (DT the) (NN river)))) (. .))");
    const DistanceVector d = generate_distances(tree);
    if (d.values != std::vector<std::int32_t>{4, 3, 2, 1, 4})
        outcome.fail("word distances differ");
    const LocalRangeMask mask = induce_from_distances(d);
    const std::pair<std::size_t, std::size_t> expected[6] = {
        {0, 5}, {0, 4}, {1, 4}, {2, 4}, {3, 5}, {0, 5},
    };
    for (std::size_t i = 0; i < 6 && outcome.pass; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            if (mask.at(i, j) != (j >= expected[i].first && j <= expected[i].second)) {
                outcome.fail("mask row " + std::to_string(i + 1) + " differs");
                break;
            }
    if (!masks_equal(mask, range_from_tree(tree)))
        outcome.fail("tree-derived mask differs");
    if (outcome.pass)
        outcome.detail = "distances [4,3,2,1,4], rows 1-6/1-5/2-5/3-5/4-6/1-6";
    return outcome;
}

// --- criterion 4: soft/hard consistency --------------------------------------

Outcome criterion_soft_hard() {
    Outcome outcome;
    std::mt19937_64 rng(404);
    double max_diff = 0.0;
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 2 + rng() % 16;
        std::vector<std::int32_t> values(n - 1);
        for (std::size_t g = 0; g < values.size(); ++g)
            values[g] = static_cast<std::int32_t>(g + 1);
        std::shuffle(values.begin(), values.end(), rng);
        DistanceVector d;
        d.values = values;
        d.token_count = n;

        const SoftMask tiny_tau = build_soft_mask(d, SoftMaskConfig{1e-6, 1e-6});
        const LocalRangeMask hard = induce_from_distances(d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (j + 1 >= i && j <= i + 1)
                    continue; // forced band
                max_diff = std::max(
                    max_diff, std::abs(tiny_tau.at(i, j) - (hard.at(i, j) ? 1.0 : 0.0)));
            }

        const SoftMask default_tau = build_soft_mask(d, SoftMaskConfig{10.0, 1e-6});
        for (std::size_t i = 0; i < n; ++i) {
            if (default_tau.at(i, i) != 1.0 || (i > 0 && default_tau.at(i, i - 1) != 1.0) ||
                (i + 1 < n && default_tau.at(i, i + 1) != 1.0)) {
                outcome.fail("forced diagonal not exactly 1");
                return outcome;
            }
            for (std::size_t j = 0; j < n; ++j)
                if (default_tau.at(i, j) < 0.0 || default_tau.at(i, j) > 1.0) {
                    outcome.fail("entry outside [0,1]");
                    return outcome;
                }
        }
    }
    if (max_diff > 1e-6)
        outcome.fail("max |soft - hard| = " + fmt(max_diff));
    else
        outcome.detail = "100 vectors, max |soft(tau=1e-6) - hard| = " + fmt(max_diff);
    return outcome;
}

// --- criterion 5: masked softmax contract ------------------------------------

Outcome criterion_masked_softmax() {
    Outcome outcome;
    std::mt19937_64 rng(505);
    double worst_row_sum = 0.0, worst_shift = 0.0;
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 2 + rng() % 10;
        Matrix mask(n, n), logits(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            mask(i, i) = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                logits(i, j) = 60.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 30.0;
                if (j != i)
                    mask(i, j) =
                        rng() % 3 == 0 ? 0.0 : static_cast<double>(rng() >> 11) * 0x1.0p-53;
            }
        }
        const Matrix out = masked_softmax(mask, logits);
        for (std::size_t i = 0; i < n; ++i) {
            double row_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row_sum += out(i, j);
                if (mask(i, j) == 0.0 && out(i, j) != 0.0) {
                    outcome.fail("zero-support entry not exactly 0");
                    return outcome;
                }
            }
            worst_row_sum = std::max(worst_row_sum, std::abs(row_sum - 1.0));
        }
        Matrix shifted = logits;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                shifted(i, j) += 3.5 * static_cast<double>(i + 1);
        const Matrix out_shifted = masked_softmax(mask, shifted);
        for (std::size_t idx = 0; idx < out.size(); ++idx)
            worst_shift =
                std::max(worst_shift, std::abs(out.data()[idx] - out_shifted.data()[idx]));
    }
    if (worst_row_sum > 1e-12)
        outcome.fail("row sum off by " + fmt(worst_row_sum));
    if (worst_shift > 1e-12)
        outcome.fail("shift variance " + fmt(worst_shift));
    if (outcome.pass)
        outcome.detail = "100 pairs, max |row sum - 1| = " + fmt(worst_row_sum) +
                         ", max shift delta = " + fmt(worst_shift);
    return outcome;
}

// --- criterion 6: vanilla reduction -------------------------------------------

Outcome criterion_vanilla_reduction() {
    Outcome outcome;
    AttentionConfig cfg;
    cfg.d_model = 16;
    cfg.num_heads = 4;
    cfg.grammar_heads = 0;
    const AttentionLayer layer = AttentionLayer::seeded(cfg, 606);
    const Matrix input = seeded_matrix(607, 6, 16);
    DistanceVector d;
    d.values = {4, 3, 2, 1, 4};
    d.token_count = 6;
    const Matrix mask = mask_to_matrix(induce_from_distances(d));
    const Matrix out = encoder_forward(layer, input, mask);
    const Matrix ref = testref::vanilla_encoder_forward(layer, input);
    double max_diff = 0.0;
    for (std::size_t idx = 0; idx < out.size(); ++idx)
        max_diff = std::max(max_diff, std::abs(out.data()[idx] - ref.data()[idx]));
    if (max_diff > 1e-15)
        outcome.fail("max elementwise diff " + fmt(max_diff));
    else
        outcome.detail = "g=0 vs mask-free layer, max diff = " + fmt(max_diff);
    return outcome;
}

// --- criterion 7: gradient correctness ----------------------------------------

Outcome criterion_gradients() {
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    AttentionConfig cfg;
    cfg.d_model = 16;
    cfg.num_heads = 4;
    cfg.grammar_heads = 2;
    const AttentionLayer layer = AttentionLayer::seeded(cfg, 707);
    const Matrix input = seeded_matrix(708, 6, 16);
    const Matrix upstream = seeded_matrix(709, 6, 16);
    DistanceVector d;
    d.values = {4, 3, 2, 1, 4};
    d.token_count = 6;

    const Matrix hard = mask_to_matrix(induce_from_distances(d));
    const GradCheckReport hard_report = finite_difference_check(layer, input, hard, upstream);
    const Matrix soft = soft_to_matrix(build_soft_mask(d, SoftMaskConfig{10.0, 1e-6}));
    const GradCheckReport soft_report = finite_difference_check(layer, input, soft, upstream);

    const double elapsed = seconds_since(start);
    if (hard_report.max_rel_error >= 1e-5)
        outcome.fail("hard mask max rel err " + fmt(hard_report.max_rel_error));
    if (soft_report.max_rel_error >= 1e-5)
        outcome.fail("soft mask max rel err " + fmt(soft_report.max_rel_error));
    if (elapsed >= 30.0)
        outcome.fail("took " + fmt(elapsed) + "s (expected < 30s)");
    if (outcome.pass)
        outcome.detail = "max rel err hard = " + fmt(hard_report.max_rel_error) +
                         ", soft = " + fmt(soft_report.max_rel_error) + " over " +
                         std::to_string(hard_report.checked_parameters) + " params in " +
                         fmt(elapsed) + "s";
    return outcome;
}

// --- criteria 8 & 9: CLI pipeline ----------------------------------------------

struct CliFixture {
    fs::path dir;
    std::string cli;

    explicit CliFixture(std::string cli_path) : cli(std::move(cli_path)) {
        dir = fs::temp_directory_path() /
              ("sgattn_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~CliFixture() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    int run(const std::string& args) const {
        const std::string command = "\"" + cli + "\" " + args + " 2>/dev/null";
        return std::system(command.c_str());
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

Outcome criterion_pipeline_bit_exact(const CliFixture& fixture) {
    Outcome outcome;
    std::string trees;
    for (int i = 0; i < 100; ++i)
        trees += render_ptb(random_tree(2 + i % 19, 8800 + i)) + "\n";
    const std::string tree_path = fixture.path("fixture.trees");
    std::ofstream(tree_path, std::ios::binary) << trees;

    const std::string out1 = fixture.path("d1.jsonl"), out2 = fixture.path("d2.jsonl"),
                      out8 = fixture.path("d8.jsonl");
    if (fixture.run("distance \"" + tree_path + "\" --output \"" + out1 + "\" --jobs 1") != 0 ||
        fixture.run("distance \"" + tree_path + "\" --output \"" + out2 + "\" --jobs 1") != 0 ||
        fixture.run("distance \"" + tree_path + "\" --output \"" + out8 + "\" --jobs 8") != 0) {
        outcome.fail("distance command failed");
        return outcome;
    }
    const std::string d1 = slurp(out1);
    if (d1.empty() || d1 != slurp(out2) || d1 != slurp(out8)) {
        outcome.fail("distance outputs differ across runs/jobs");
        return outcome;
    }

    const std::string m1 = fixture.path("m1.sgam"), m2 = fixture.path("m2.sgam"),
                      m8 = fixture.path("m8.sgam");
    if (fixture.run("mask \"" + out1 + "\" --output \"" + m1 + "\" --jobs 1") != 0 ||
        fixture.run("mask \"" + out1 + "\" --output \"" + m2 + "\" --jobs 1") != 0 ||
        fixture.run("mask \"" + out1 + "\" --output \"" + m8 + "\" --jobs 8") != 0) {
        outcome.fail("mask command failed");
        return outcome;
    }
    const std::string mask_bytes = slurp(m1);
    if (mask_bytes.empty() || mask_bytes != slurp(m2) || mask_bytes != slurp(m8)) {
        outcome.fail("mask outputs differ across runs/jobs");
        return outcome;
    }

    // SGAM round trip: read every record back and re-serialize.
    std::istringstream in(mask_bytes, std::ios::binary);
    std::ostringstream rewritten(std::ios::binary);
    std::size_t records = 0;
    while (auto mask = read_mask(in)) {
        write_mask(rewritten, *mask);
        ++records;
    }
    if (records != 100 || std::move(rewritten).str() != mask_bytes) {
        outcome.fail("SGAM round trip not byte-identical");
        return outcome;
    }
    outcome.detail = "100 sentences, distance+mask byte-identical across runs and jobs 1/8, " +
                     std::to_string(records) + " SGAM records round-trip";
    return outcome;
}

Outcome criterion_bpe_rule(const CliFixture& fixture) {
    Outcome outcome;
    const std::string tree =
        "(S (NP (PRP I)) (VP (VBP swim) (PP (IN across) (NP (DT the) (NN river)))) (. .))";
    const std::string tree_path = fixture.path("bpe.trees");
    std::ofstream(tree_path, std::ios::binary) << tree << "\n";
    const std::string subword_path = fixture.path("bpe.subwords");
    std::ofstream(subword_path, std::ios::binary) << "I sw@@ im across the river .\n";
    const std::string out = fixture.path("bpe.jsonl");
    if (fixture.run("distance \"" + tree_path + "\" --subwords \"" + subword_path +
                    "\" --output \"" + out + "\"") != 0) {
        outcome.fail("distance --subwords failed");
        return outcome;
    }
    const auto record = nlohmann::json::parse(slurp(out));
    if (record["distance"] != nlohmann::json({5, 1, 4, 3, 2, 5})) {
        outcome.fail("subword distances differ: " + record["distance"].dump());
        return outcome;
    }

    const std::string doc_trees = fixture.path("doc.trees");
    std::ofstream(doc_trees, std::ios::binary) << tree << "\n(R a b)\n";
    const std::string doc_out = fixture.path("doc.jsonl");
    if (fixture.run("distance \"" + doc_trees + "\" --doc --output \"" + doc_out + "\"") != 0) {
        outcome.fail("distance --doc failed");
        return outcome;
    }
    const auto doc_record = nlohmann::json::parse(slurp(doc_out));
    std::size_t sentinels = 0, boundary_index = 0;
    const auto& values = doc_record["distance"];
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == 999) {
            ++sentinels;
            boundary_index = i;
        }
    if (sentinels != 1 || boundary_index != 5) {
        outcome.fail("expected exactly one 999 at the sentence boundary, got " +
                     values.dump());
        return outcome;
    }
    outcome.detail = "sw@@ im -> [5,1,4,3,2,5]; --doc emits exactly one 999 at the boundary";
    return outcome;
}

} // namespace

int main(int argc, char** argv) {
    std::string cli_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli")
            cli_path = argv[i + 1];

    struct Entry {
        const char* name;
        std::function<Outcome()> run;
    };
    CliFixture fixture(cli_path);
    const std::vector<Entry> criteria = {
        {"keystone equivalence (induced vs tree-derived masks)", criterion_keystone},
        {"sign property of generated distances", criterion_sign_property},
        {"worked example: distances and mask rows", criterion_worked_example},
        {"soft/hard mask consistency", criterion_soft_hard},
        {"masked softmax contract", criterion_masked_softmax},
        {"vanilla reduction at g=0", criterion_vanilla_reduction},
        {"gradient correctness vs finite differences", criterion_gradients},
        {"pipeline bit-exactness",
         [&fixture, &cli_path]() {
             if (cli_path.empty()) {
                 Outcome o;
                 o.fail("--cli path not provided");
                 return o;
             }
             return criterion_pipeline_bit_exact(fixture);
         }},
        {"BPE expansion and document sentinel via CLI",
         [&fixture, &cli_path]() {
             if (cli_path.empty()) {
                 Outcome o;
                 o.fail("--cli path not provided");
                 return o;
             }
             return criterion_bpe_rule(fixture);
         }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& ex) {
            outcome.fail(std::string("exception: ") + ex.what());
        }
        std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
                  << criteria[i].name
                  << (outcome.detail.empty() ? "" : ": " + outcome.detail) << "\n";
        if (!outcome.pass)
            ++failures;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
