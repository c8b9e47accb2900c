// SPDX-License-Identifier: Apache-2.0
// artqr command-line front end.

#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "artqr/errors.hpp"
#include "artqr/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kDecode = 2, kNonConvergence = 3, kFailure = 4 };

void add_symbol_options(CLI::App* cmd, artqr::SymbolOptions& symbol, std::string& level) {
    cmd->add_option("--version", symbol.version, "QR version (1-10)")->capture_default_str();
    cmd->add_option("--ec", level, "error correction level: L, M, Q or H")->capture_default_str();
    cmd->add_option("--mask", symbol.mask, "mask pattern (0-7)")->capture_default_str();
    cmd->add_option("--module-px", symbol.module_px, "pixels per module edge (odd)")->capture_default_str();
    cmd->add_option("--quiet-zone", symbol.quiet_zone, "quiet zone width in modules")->capture_default_str();
    cmd->add_option("--radius", symbol.spot_radius, "spot radius in pixels (default module-px/4)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aesthetic QR code toolkit: blend, stylize, correct and verify."};
    app.require_subcommand(1);

    artqr::GenerateCommand gen;
    std::string gen_level = "L";
    auto* generate = app.add_subcommand("generate", "blend a message into an image");
    generate->add_option("message", gen.message, "payload text")->required();
    generate->add_option("image", gen.input, "input PNG")->required()->check(CLI::ExistingFile);
    generate->add_option("-o,--output", gen.output, "output PNG")->required();
    generate->add_option("--meta", gen.meta_output, "sidecar path (default: output with .meta)");
    add_symbol_options(generate, gen.symbol, gen_level);

    artqr::StylizeCommand sty;
    auto* stylize = app.add_subcommand("stylize", "apply a stylizer to a generated code");
    stylize->add_option("image", sty.input, "blended PNG")->required()->check(CLI::ExistingFile);
    stylize->add_option("--meta", sty.meta, "input sidecar (default: image with .meta)");
    stylize->add_option("-o,--output", sty.output, "output PNG")->required();
    stylize->add_option("--meta-out", sty.meta_output, "output sidecar (default: output with .meta)");
    auto* builtin = stylize->add_option("--stylizer", sty.stylizer, "built-in stylizer, name[:key=value,...]");
    auto* external = stylize->add_option("--external", sty.external, "external command run as CMD in.png out.png");
    builtin->excludes(external);
    stylize->callback([&] {
        if (sty.stylizer.empty() && sty.external.empty())
            throw CLI::ValidationError("stylize", "one of --stylizer or --external is required");
    });

    artqr::CorrectCommand cor;
    auto* correct = app.add_subcommand("correct", "repair modules until every one is robust");
    correct->add_option("image", cor.input, "stylized PNG")->required()->check(CLI::ExistingFile);
    correct->add_option("--meta", cor.meta, "input sidecar (default: image with .meta)");
    correct->add_option("-o,--output", cor.output, "output PNG")->required();
    correct->add_option("--meta-out", cor.meta_output, "output sidecar (default: output with .meta)");
    correct->add_option("--report", cor.report, "write the correction report here");
    correct->add_option("--delta", cor.delta, "threshold margin fraction in [0, 1]");
    correct->add_option("--radius", cor.radius, "spot radius in pixels");
    correct->add_option("--eta", cor.eta, "robustness score cut-off in (0, 1]");
    correct->add_option("--max-iterations", cor.max_iterations, "correction round limit")->capture_default_str();

    artqr::VerifyCommand ver;
    auto* verify = app.add_subcommand("verify", "decode an image against its sidecar");
    verify->add_option("image", ver.input, "PNG to check")->required();
    verify->add_option("--meta", ver.meta, "sidecar (default: image with .meta)");

    artqr::EvalCommand ev;
    std::string ev_level = "L";
    auto* eval = app.add_subcommand("eval", "batch SSIM, error counts and decode-rate trials");
    eval->add_option("corpus", ev.corpus_dir, "directory of PNG images")->required();
    eval->add_option("-o,--output", ev.output, "CSV path (default: stdout)");
    eval->add_option("--message", ev.message, "payload text")->capture_default_str();
    eval->add_option("--stylizer", ev.stylizer, "built-in stylizer applied before correction");
    eval->add_option("--delta", ev.delta, "correction margin")->capture_default_str();
    eval->add_option("--distortion", ev.distortion, "e.g. brightness=40,scale=0.6,noise=2");
    eval->add_option("--trials", ev.trials, "decode trials per image")->capture_default_str();
    eval->add_option("--seed", ev.seed, "master seed")->capture_default_str();
    eval->add_flag("--compare-standard", ev.compare_standard, "add SSIM of a plain QR rendering");
    add_symbol_options(eval, ev.symbol, ev_level);

    artqr::CorpusCommand corp;
    auto* corpus = app.add_subcommand("corpus", "write the built-in synthetic test images");
    corpus->add_option("dir", corp.dir, "output directory")->required();
    corpus->add_option("--size", corp.size, "edge length in pixels")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (generate->parsed()) {
            gen.symbol.level = artqr::parse_ec_level(gen_level);
            artqr::cmd_generate(gen, std::cout);
        } else if (stylize->parsed()) {
            artqr::cmd_stylize(sty, std::cout);
        } else if (correct->parsed()) {
            artqr::cmd_correct(cor, std::cout);
        } else if (verify->parsed()) {
            artqr::cmd_verify(ver, std::cout);
        } else if (eval->parsed()) {
            ev.symbol.level = artqr::parse_ec_level(ev_level);
            artqr::cmd_eval(ev, std::cout);
        } else if (corpus->parsed()) {
            artqr::cmd_corpus(corp, std::cout);
        }
    } catch (const artqr::NonConvergence& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const artqr::VerificationFailure& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kDecode;
    } catch (const artqr::FormatInfoError& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kDecode;
    } catch (const artqr::UncorrectableError& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kDecode;
    } catch (const artqr::CapacityExceeded& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "artqr: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
