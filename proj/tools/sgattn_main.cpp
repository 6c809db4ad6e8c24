#include "sgattn/kernels.hpp"
#include "sgattn/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

// "n,d_model,heads,grammar_heads"
bool parse_demo_shape(const std::string& text, sgattn::AttendOptions& options) {
    std::vector<std::size_t> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string piece = text.substr(start, comma - start);
        try {
            parts.push_back(std::stoull(piece));
        } catch (...) {
            return false;
        }
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (parts.size() != 4)
        return false;
    options.n = parts[0];
    options.d_model = parts[1];
    options.num_heads = parts[2];
    options.grammar_heads = parts[3];
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"syntax-guided localized attention pipeline"};
    app.require_subcommand(1);

    sgattn::DistanceOptions distance_options;
    CLI::App* distance = app.add_subcommand(
        "distance", "convert bracketed trees into syntactic distance records");
    distance->add_option("input", distance_options.input_path, "tree file, one tree per line")
        ->required();
    distance->add_option("--output", distance_options.output_path, "JSON-lines output ('-' = stdout)");
    distance->add_option("--subwords", distance_options.subword_path,
                         "subword file, one space-separated line per sentence ('@@' continuation)");
    distance->add_flag("--doc", distance_options.doc_mode,
                       "join all sentences into one document record");
    distance->add_option("--sentinel", distance_options.sentinel, "sentence-boundary distance");
    distance->add_option("--jobs", distance_options.jobs, "worker threads");

    sgattn::MaskOptions mask_options;
    CLI::App* mask = app.add_subcommand("mask", "build SGAM mask files from distance records");
    mask->add_option("input", mask_options.input_path, "distance JSON-lines file")->required();
    mask->add_option("--output", mask_options.output_path, "SGAM output file")->required();
    mask->add_flag("--soft", mask_options.soft, "smoothed mask instead of hard 0/1");
    mask->add_option("--tau", mask_options.tau, "softness temperature");
    mask->add_option("--jobs", mask_options.jobs, "worker threads");

    sgattn::AttendOptions attend_options;
    std::string demo_shape;
    CLI::App* attend = app.add_subcommand(
        "attend", "run a seeded encoder layer under a mask and verify support patterns");
    attend->add_option("mask", attend_options.mask_path, "SGAM mask file")->required();
    attend->add_option("--demo-shape", demo_shape, "n,d_model,heads,grammar_heads")->required();
    attend->add_option("--seed", attend_options.seed, "weight/input seed");
    attend->add_flag("--gradcheck", attend_options.gradcheck,
                     "verify gradients against finite differences");

    sgattn::CheckOptions check_options;
    CLI::App* check = app.add_subcommand(
        "check", "verify the sign property and mask equivalence for every tree");
    check->add_option("input", check_options.input_path, "tree file")->required();
    check->add_option("--jobs", check_options.jobs, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*distance)
            return sgattn::run_distance(distance_options, std::cerr);
        if (*mask)
            return sgattn::run_mask(mask_options, std::cerr);
        if (*attend) {
            if (!parse_demo_shape(demo_shape, attend_options)) {
                std::cerr << "--demo-shape must be n,d_model,heads,grammar_heads\n";
                return 2;
            }
            return sgattn::run_attend(attend_options, std::cout, std::cerr);
        }
        if (*check)
            return sgattn::run_check(check_options, std::cout);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
