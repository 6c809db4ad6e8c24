#include "sgattn/pipeline.hpp"

#include "sgattn/attention.hpp"
#include "sgattn/errors.hpp"
#include "sgattn/local_range.hpp"
#include "sgattn/mask_io.hpp"
#include "sgattn/soft_mask.hpp"
#include "sgattn/tree.hpp"

#include <json.hpp>

#include <atomic>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

namespace sgattn {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

bool skippable(const std::string& line) {
    return line.find_first_not_of(" \t") == std::string::npos || line.front() == '#';
}

std::vector<std::string> split_whitespace(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string word;
    while (in >> word)
        out.push_back(std::move(word));
    return out;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
            fn(i);
    };
    std::vector<std::thread> pool;
    const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    pool.reserve(spawn);
    for (unsigned t = 0; t < spawn; ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();
}

struct OutputFile {
    std::ofstream file;
    std::ostream* stream;

    OutputFile(const std::string& path, bool binary) {
        if (path == "-") {
            stream = &std::cout;
            return;
        }
        file.open(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!file)
            throw Error("cannot open " + path + " for writing");
        stream = &file;
    }
};

struct SentenceLine {
    std::size_t line_no; // 1-based
    const std::string* text;
};

std::vector<SentenceLine> sentence_lines(const std::vector<std::string>& lines) {
    std::vector<SentenceLine> out;
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (!skippable(lines[i]))
            out.push_back({i + 1, &lines[i]});
    return out;
}

std::uint64_t fnv1a64(const unsigned char* data, std::size_t len) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= data[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace

int run_distance(const DistanceOptions& options, std::ostream& diagnostics) {
    const std::vector<std::string> lines = read_lines(options.input_path);
    const std::vector<SentenceLine> sentences = sentence_lines(lines);

    std::vector<std::string> subword_lines;
    const bool have_subwords = !options.subword_path.empty();
    if (have_subwords) {
        subword_lines = read_lines(options.subword_path);
        if (subword_lines.size() != sentences.size()) {
            diagnostics << "subword file has " << subword_lines.size() << " lines but input has "
                        << sentences.size() << " sentences\n";
            return 1;
        }
    }

    struct Result {
        bool ok = false;
        std::string error;
        std::vector<std::string> tokens;
        std::vector<std::string> subwords;
        DistanceVector distance;
    };
    std::vector<Result> results(sentences.size());
    parallel_for(sentences.size(), options.jobs, [&](std::size_t i) {
        Result& r = results[i];
        try {
            const ConstituencyTree tree = parse_ptb(*sentences[i].text);
            const DistanceVector word_level = generate_distances(tree);
            BpeAlignment align =
                have_subwords
                    ? BpeAlignment::from_subwords(split_whitespace(subword_lines[i]))
                    : BpeAlignment::identity(tree.tokens());
            r.distance = expand_bpe(word_level, align);
            r.tokens = tree.tokens();
            if (have_subwords)
                r.subwords = std::move(align.subword_tokens);
            r.ok = true;
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
    });

    bool failed = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) {
            diagnostics << "line " << sentences[i].line_no << ": " << results[i].error << "\n";
            failed = true;
        }
    }

    OutputFile out(options.output_path, /*binary=*/false);
    auto emit = [&](const std::string& id, const Result& r, const DistanceVector& d) {
        nlohmann::ordered_json record;
        record["id"] = id;
        record["tokens"] = r.tokens;
        if (have_subwords)
            record["subwords"] = r.subwords;
        record["distance"] = d.values;
        *out.stream << record.dump() << "\n";
    };

    if (options.doc_mode) {
        if (failed)
            return 1;
        if (results.empty())
            return 0;
        Result doc;
        std::vector<DistanceVector> parts;
        parts.reserve(results.size());
        for (const Result& r : results) {
            doc.tokens.insert(doc.tokens.end(), r.tokens.begin(), r.tokens.end());
            doc.subwords.insert(doc.subwords.end(), r.subwords.begin(), r.subwords.end());
            parts.push_back(r.distance);
        }
        try {
            const DistanceVector joined = concat_sentences(parts, options.sentinel);
            emit("doc", doc, joined);
        } catch (const std::exception& ex) {
            diagnostics << "document concatenation failed: " << ex.what() << "\n";
            return 1;
        }
        return 0;
    }

    for (std::size_t i = 0; i < results.size(); ++i)
        if (results[i].ok)
            emit(std::to_string(sentences[i].line_no), results[i], results[i].distance);
    return failed ? 1 : 0;
}

namespace {

// Parses one JSON-lines record and renders its SGAM bytes.
std::string mask_record_bytes(const std::string& line, const MaskOptions& options) {
    const nlohmann::json record = nlohmann::json::parse(line);
    if (!record.contains("distance") || !record["distance"].is_array())
        throw Error("record has no distance array");
    DistanceVector d;
    for (const auto& item : record["distance"].items()) {
        if (!item.value().is_number_integer())
            throw Error("distance values must be integers");
        const std::int64_t v = item.value().get<std::int64_t>();
        if (v < 1)
            throw Error("distance value " + std::to_string(v) + " below finalized minimum 1");
        d.values.push_back(static_cast<std::int32_t>(v));
    }
    d.token_count = d.values.size() + 1;
    if (record.contains("subwords")) {
        if (record["subwords"].size() != d.token_count)
            throw Error("subword count does not match distance length");
    } else if (record.contains("tokens")) {
        if (record["tokens"].size() != d.token_count)
            throw Error("token count does not match distance length");
    }
    std::ostringstream bytes(std::ios::binary);
    if (options.soft)
        write_mask(bytes, build_soft_mask(d, SoftMaskConfig{options.tau, 1e-6}));
    else
        write_mask(bytes, induce_from_distances(d));
    return std::move(bytes).str();
}

} // namespace

int run_mask(const MaskOptions& options, std::ostream& diagnostics) {
    const std::vector<std::string> lines = read_lines(options.input_path);
    std::vector<SentenceLine> records;
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (lines[i].find_first_not_of(" \t") != std::string::npos)
            records.push_back({i + 1, &lines[i]});

    struct Result {
        bool ok = false;
        std::string error;
        std::string bytes;
    };
    std::vector<Result> results(records.size());
    parallel_for(records.size(), options.jobs, [&](std::size_t i) {
        try {
            results[i].bytes = mask_record_bytes(*records[i].text, options);
            results[i].ok = true;
        } catch (const std::exception& ex) {
            results[i].error = ex.what();
        }
    });

    OutputFile out(options.output_path, /*binary=*/true);
    bool failed = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) {
            diagnostics << "line " << records[i].line_no << ": " << results[i].error << "\n";
            failed = true;
            continue;
        }
        out.stream->write(results[i].bytes.data(),
                          static_cast<std::streamsize>(results[i].bytes.size()));
    }
    return failed ? 1 : 0;
}

int run_attend(const AttendOptions& options, std::ostream& out, std::ostream& diagnostics) {
    std::ifstream in(options.mask_path, std::ios::binary);
    if (!in) {
        diagnostics << "cannot open " << options.mask_path << "\n";
        return 1;
    }
    std::optional<MaskVariant> record;
    try {
        record = read_mask(in);
    } catch (const std::exception& ex) {
        diagnostics << "bad mask file: " << ex.what() << "\n";
        return 1;
    }
    if (!record) {
        diagnostics << "mask file is empty\n";
        return 1;
    }

    const bool soft = std::holds_alternative<SoftMask>(*record);
    const std::size_t n = soft ? std::get<SoftMask>(*record).size()
                               : std::get<LocalRangeMask>(*record).size();
    if (n != options.n) {
        diagnostics << "mask n=" << n << " does not match demo shape n=" << options.n << "\n";
        return 1;
    }
    Matrix mask(n, n);
    if (soft) {
        const SoftMask& sm = std::get<SoftMask>(*record);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                mask(i, j) = sm.at(i, j);
    } else {
        const LocalRangeMask& hm = std::get<LocalRangeMask>(*record);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                mask(i, j) = hm.at(i, j) ? 1.0 : 0.0;
    }

    AttentionConfig config;
    config.d_model = options.d_model;
    config.num_heads = options.num_heads;
    config.grammar_heads = options.grammar_heads;
    config.use_soft_mask = soft;
    try {
        config.validate();
    } catch (const std::exception& ex) {
        diagnostics << "bad demo shape: " << ex.what() << "\n";
        return 1;
    }

    const AttentionLayer layer = AttentionLayer::seeded(config, options.seed);
    Matrix input(n, config.d_model);
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL);
    for (std::size_t idx = 0; idx < input.size(); ++idx)
        input.data()[idx] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;

    EncoderTrace trace;
    Matrix output;
    try {
        output = encoder_forward(layer, input, mask, &trace);
    } catch (const std::exception& ex) {
        diagnostics << "forward failed: " << ex.what() << "\n";
        return 1;
    }

    out << "mask: n=" << n << " dtype=" << (soft ? "soft" : "hard") << "\n";
    bool support_ok = true;
    for (std::size_t h = 0; h < config.num_heads; ++h) {
        const Matrix& attn = trace.head_attention[h];
        const bool grammar = h < config.grammar_heads;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j < n && ok; ++j) {
                const bool supported = grammar ? mask(i, j) > 0.0 : true;
                if (!supported && attn(i, j) != 0.0)
                    ok = false;
                if (grammar && !soft && supported && !(attn(i, j) > 0.0))
                    ok = false;
                if (!grammar && !(attn(i, j) > 0.0))
                    ok = false;
            }
        }
        out << "head " << h << (grammar ? " (grammar): " : " (global): ")
            << (ok ? (grammar ? "support matches mask" : "full support") : "SUPPORT MISMATCH")
            << "\n";
        support_ok = support_ok && ok;
    }

    std::vector<unsigned char> bytes(output.size() * sizeof(double));
    std::memcpy(bytes.data(), output.data(), bytes.size());
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    out << "output checksum: fnv1a64=0x" << checksum << "\n";

    bool gradcheck_ok = true;
    if (options.gradcheck) {
        Matrix upstream(n, config.d_model);
        std::mt19937_64 grng(options.seed + 0x517cc1b727220a95ULL);
        for (std::size_t idx = 0; idx < upstream.size(); ++idx)
            upstream.data()[idx] = 2.0 * (static_cast<double>(grng() >> 11) * 0x1.0p-53) - 1.0;
        const GradCheckReport report =
            finite_difference_check(layer, input, mask, upstream, 1e-5);
        gradcheck_ok = report.max_rel_error < 1e-5;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3e", report.max_rel_error);
        out << "gradcheck: max relative error = " << buf << " over "
            << report.checked_parameters << " parameters: " << (gradcheck_ok ? "PASS" : "FAIL")
            << "\n";
    }

    if (!support_ok) {
        diagnostics << "support-pattern verification failed\n";
        return 1;
    }
    return gradcheck_ok ? 0 : 1;
}

int run_check(const CheckOptions& options, std::ostream& out) {
    const std::vector<std::string> lines = read_lines(options.input_path);
    const std::vector<SentenceLine> sentences = sentence_lines(lines);

    struct Result {
        bool ok = false;
        std::string message;
    };
    std::vector<Result> results(sentences.size());
    parallel_for(sentences.size(), options.jobs, [&](std::size_t i) {
        Result& r = results[i];
        try {
            const ConstituencyTree tree = parse_ptb(*sentences[i].text);
            const DistanceVector d = generate_distances(tree);
            if (!verify_sign_property(tree, d)) {
                r.message = "sign property violated";
                return;
            }
            if (!masks_equal(induce_from_distances(d), range_from_tree(tree))) {
                r.message = "induced mask differs from tree-derived mask";
                return;
            }
            r.ok = true;
        } catch (const std::exception& ex) {
            r.message = std::string("parse: ") + ex.what();
        }
    });

    std::size_t passed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].ok) {
            ++passed;
            out << "line " << sentences[i].line_no << ": ok\n";
        } else {
            out << "line " << sentences[i].line_no << ": FAIL: " << results[i].message << "\n";
        }
    }
    out << "checked " << results.size() << " trees: " << passed << " ok, "
        << results.size() - passed << " failed\n";
    return passed == results.size() ? 0 : 1;
}

} // namespace sgattn
