// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end pipeline: generate (image + message -> blended symbol),
// stylize, correct, verify and batch evaluation. Each cmd_* function backs
// one artqr subcommand and reports failures by throwing.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "artqr/decoder_model.hpp"
#include "artqr/image.hpp"
#include "artqr/metrics.hpp"
#include "artqr/sidecar.hpp"
#include "artqr/stage_a.hpp"
#include "artqr/stage_c.hpp"
#include "artqr/stylize.hpp"

namespace artqr {

struct SymbolOptions {
    int version = 5;
    EcLevel level = EcLevel::L;
    int mask = 0;
    int module_px = 13;
    int quiet_zone = 4;
    int spot_radius = -1;  // negative: module_px / 4

    int resolved_spot_radius() const noexcept { return spot_radius < 0 ? module_px / 4 : spot_radius; }
};

struct GeneratedCode {
    ColorImage source;  // input resized to the core extent
    ColorImage qa;      // blended symbol including the quiet zone
    PriorityPlan plan;
    ScheduleResult schedule;
    std::size_t unscheduled_matches = 0;  // target matches of the plain encoding
    SidecarMeta meta;
};

GeneratedCode generate_code(const ColorImage& image, std::span<const std::uint8_t> payload, const SymbolOptions& options);

/// The m*a core without the quiet zone, and back.
ColorImage core_of(const ColorImage& padded, const SidecarMeta& meta);
ColorImage with_quiet_zone(const ColorImage& core, const SidecarMeta& meta);

/// Plain black-and-white rendering of the scheduled symbol with quiet zone.
ColorImage render_standard(const SidecarMeta& meta);

/// Stylizes only the core; the quiet zone is re-added afterwards. Exactly
/// one of `stylizer` / `external_command` must be given.
StylizeResult stylize_code(const ColorImage& qa, const SidecarMeta& meta, const std::optional<StylizerSpec>& stylizer,
                           const std::string& external_command);

struct CorrectedCode {
    CorrectionResult correction;  // correction.qc is the final image
    SidecarMeta meta;
};

/// Runs the correction loop over the padded image so thresholds match what a
/// reader sees. Throws NonConvergence.
CorrectedCode correct_code(const ColorImage& qb, const SidecarMeta& meta, const RobustnessParams& params);

struct VerifyReport {
    DecodeReport decode;
    bool digest_ok = false;
    RobustnessReport robustness;
    std::array<std::size_t, 10> histogram{};  // robustness scores in tenths
    std::size_t error_modules = 0;

    bool ok() const noexcept { return decode.ok() && digest_ok; }
};

VerifyReport verify_code(const ColorImage& image, const SidecarMeta& meta);
void print_verify_report(std::ostream& out, const VerifyReport& report, const SidecarMeta& meta);

/// Sidecar path next to an image: "x.png" -> "x.meta".
std::string default_meta_path(const std::string& image_path);

struct GenerateCommand {
    std::string message;
    std::string input;
    std::string output;
    std::string meta_output;  // empty: derived from output
    SymbolOptions symbol;
};

struct StylizeCommand {
    std::string input;
    std::string meta;  // empty: derived from input
    std::string output;
    std::string meta_output;
    std::string stylizer;  // "name[:k=v,...]"
    std::string external;  // shell command
};

struct CorrectCommand {
    std::string input;
    std::string meta;
    std::string output;
    std::string meta_output;
    std::string report;  // empty: no report file
    std::optional<double> delta;
    std::optional<int> radius;
    std::optional<double> eta;
    int max_iterations = 20;
};

struct VerifyCommand {
    std::string input;
    std::string meta;
};

struct EvalCommand {
    std::string corpus_dir;
    std::string output;  // CSV path; empty: write to the log stream
    std::string message = "https://example.com/aesthetic-qr";
    std::string stylizer;  // empty: no stylization
    double delta = 0.2;
    std::string distortion;  // empty: no decode-rate column
    std::size_t trials = 50;
    std::uint64_t seed = 1;
    bool compare_standard = false;
    SymbolOptions symbol;
};

struct CorpusCommand {
    std::string dir;
    int size = 512;
};

void cmd_generate(const GenerateCommand& cmd, std::ostream& log);
void cmd_stylize(const StylizeCommand& cmd, std::ostream& log);
void cmd_correct(const CorrectCommand& cmd, std::ostream& log);
/// Prints the report; throws VerificationFailure when decoding fails or the
/// digest differs.
void cmd_verify(const VerifyCommand& cmd, std::ostream& out);
void cmd_eval(const EvalCommand& cmd, std::ostream& log);
void cmd_corpus(const CorpusCommand& cmd, std::ostream& log);

/// Text form of a correction run (iterations, registry size, per-round
/// flagged counts).
std::string correction_report_text(const CorrectedCode& corrected);

}  // namespace artqr
