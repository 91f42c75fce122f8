#include "qlna/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace qlna::cli;

    CLI::App app{"Cryogenic LNA analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions options;
    std::uint64_t seed = 0;
    std::string variant, format;
    app.add_option("--config", options.config_path, "YAML or JSON run configuration")->required();
    app.add_option("--out-dir", options.out_dir, "directory for CSV/JSON artifacts");
    auto* seed_opt = app.add_option("--seed", seed, "overrides analysis.seed");
    auto* variant_opt = app.add_option("--variant", variant, "noise-figure variant")
                            ->check(CLI::IsMember({"paper", "textbook"}));
    auto* format_opt = app.add_option("--format", format, "emit only this format")
                           ->check(CLI::IsMember({"csv", "json"}));

    for (const auto& name : subcommands()) {
        app.add_subcommand(name)->callback([&options, name] { options.subcommand = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }
    if (*seed_opt) options.seed = seed;
    if (*variant_opt) options.variant = variant;
    if (*format_opt) options.format = format;

    return run(options, std::cout, std::cerr);
}
