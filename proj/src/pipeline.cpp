// SPDX-License-Identifier: Apache-2.0
#include "artqr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "artqr/corpus.hpp"
#include "artqr/errors.hpp"
#include "artqr/png_io.hpp"

namespace artqr {
namespace {

constexpr Rgb kQuietWhite{255, 255, 255};

std::string printable(const Bytes& payload) {
    std::string out;
    for (std::uint8_t c : payload) {
        if (c >= 0x20 && c < 0x7F && c != '\\') {
            out.push_back(static_cast<char>(c));
        } else {
            std::ostringstream esc;
            esc << "\\x" << std::hex << std::setw(2) << std::setfill('0') << int(c);
            out += esc.str();
        }
    }
    return out;
}

std::string csv_field(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

ModuleGrid core_grid(const SidecarMeta& meta) { return ModuleGrid(meta.grid.module_px, meta.grid.modules); }

void require_padded_shape(const ColorImage& image, const SidecarMeta& meta) {
    const int expect = meta.grid.extent() + 2 * meta.quiet_zone * meta.grid.module_px;
    if (image.width() != expect || image.height() != expect)
        throw DimensionMismatch("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                                ", sidecar geometry expects " + std::to_string(expect) + "x" + std::to_string(expect));
}

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace

GeneratedCode generate_code(const ColorImage& image, std::span<const std::uint8_t> payload, const SymbolOptions& options) {
    if (options.mask < 0 || options.mask > 7) throw std::invalid_argument("mask must lie in [0, 7]");
    if (options.version < kMinVersion || options.version > kMaxVersion)
        throw std::invalid_argument("version must lie in [" + std::to_string(kMinVersion) + ", " +
                                    std::to_string(kMaxVersion) + "]");
    if (options.quiet_zone < 0) throw std::invalid_argument("quiet zone must be non-negative");
    if (image.empty()) throw DimensionMismatch("input image is empty");
    const int m = symbol_size(options.version);
    const int a = options.module_px;
    const int r = options.resolved_spot_radius();

    GeneratedCode out;
    out.meta.version = options.version;
    out.meta.level = options.level;
    out.meta.mask = options.mask;
    out.meta.quiet_zone = options.quiet_zone;
    out.meta.grid = ModuleGrid(a, m, options.quiet_zone * a, options.quiet_zone * a);
    out.meta.params.spot_radius = r;
    out.meta.params.validate(out.meta.grid);

    const CodewordFrame frame = encode_message(payload, options.version, options.level);
    out.source = resize_bilinear(image, m * a, m * a);
    const QrMatrix layout = QrMatrix::layout(options.version, options.level, options.mask);
    const GaussianModuleKernel kernel(a);
    out.plan = compute_plan(to_gray(out.source), kernel, layout);
    out.schedule = schedule(frame, out.plan, options.mask);
    out.unscheduled_matches = count_target_matches(build_matrix(frame, options.mask), out.plan);

    out.meta.dark_bits = out.schedule.matrix.bits();
    out.meta.payload_sha256 = sha256_hex(payload);
    std::ostringstream prov;
    prov << "generate " << timestamp_now() << " version=" << options.version << " ec=" << to_string(options.level)
         << " mask=" << options.mask << " module_px=" << a << " spot_radius=" << r;
    out.meta.provenance.push_back(prov.str());
    out.qa = compose_qa(with_quiet_zone(out.source, out.meta), out.schedule.matrix, out.meta.grid, r);
    return out;
}

ColorImage core_of(const ColorImage& padded, const SidecarMeta& meta) {
    require_padded_shape(padded, meta);
    return crop(padded, meta.grid.origin_x, meta.grid.origin_y, meta.grid.extent(), meta.grid.extent());
}

ColorImage with_quiet_zone(const ColorImage& core, const SidecarMeta& meta) {
    if (core.width() != meta.grid.extent() || core.height() != meta.grid.extent())
        throw DimensionMismatch("core raster does not match the module grid");
    return pad(core, meta.quiet_zone * meta.grid.module_px, kQuietWhite);
}

ColorImage render_standard(const SidecarMeta& meta) {
    return with_quiet_zone(render_plain(meta.scheduled(), core_grid(meta)), meta);
}

StylizeResult stylize_code(const ColorImage& qa, const SidecarMeta& meta, const std::optional<StylizerSpec>& stylizer,
                           const std::string& external_command) {
    if (stylizer.has_value() == !external_command.empty())
        throw std::invalid_argument("give exactly one of a built-in stylizer or an external command");
    const ColorImage core = core_of(qa, meta);
    StylizeResult result = stylizer ? apply_stylizer(core, *stylizer) : apply_external_stylizer(core, external_command);
    result.image = with_quiet_zone(result.image, meta);
    return result;
}

CorrectedCode correct_code(const ColorImage& qb, const SidecarMeta& meta, const RobustnessParams& params) {
    meta.validate();
    require_padded_shape(qb, meta);
    CorrectedCode out;
    out.correction = correct(qb, meta.scheduled(), meta.grid, GaussianModuleKernel(meta.grid.module_px), params);
    out.meta = meta;
    out.meta.params = params;
    std::ostringstream prov;
    prov << "correct " << timestamp_now() << " delta=" << params.delta << " eta=" << params.eta
         << " spot_radius=" << params.spot_radius << " iterations=" << out.correction.report.iterations
         << " registry=" << out.correction.report.registry.size();
    out.meta.provenance.push_back(prov.str());
    return out;
}

VerifyReport verify_code(const ColorImage& image, const SidecarMeta& meta) {
    meta.validate();
    require_padded_shape(image, meta);
    VerifyReport report;
    report.decode = try_decode(image, meta.grid, meta.mask);
    report.digest_ok = report.decode.ok() && sha256_hex(report.decode.result.payload) == meta.payload_sha256;
    const QrMatrix scheduled = meta.scheduled();
    report.robustness =
        evaluate_image(to_gray(image), scheduled, meta.grid, GaussianModuleKernel(meta.grid.module_px), meta.params);
    for (double s : report.robustness.scores)
        ++report.histogram[static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(s * 10.0)), 0, 9))];
    report.error_modules = error_module_count(image, scheduled, meta.grid);
    return report;
}

void print_verify_report(std::ostream& out, const VerifyReport& report, const SidecarMeta& meta) {
    if (report.decode.ok()) {
        out << "status: " << (report.digest_ok ? "ok" : "payload digest mismatch") << '\n'
            << "payload: " << printable(report.decode.result.payload) << '\n'
            << "rs_corrections: " << report.decode.result.corrections << '\n';
    } else {
        out << "status: decode failed (" << report.decode.message << ")\n";
    }
    out << "error_modules: " << report.error_modules << '\n'
        << "non_robust_modules: " << report.robustness.non_robust.size() << " (delta=" << meta.params.delta
        << ", eta=" << meta.params.eta << ")\n"
        << "robustness_histogram:\n";
    for (std::size_t i = 0; i < report.histogram.size(); ++i)
        out << "  " << fixed(i / 10.0, 1) << '-' << fixed((i + 1) / 10.0, 1) << ": " << report.histogram[i] << '\n';
}

std::string default_meta_path(const std::string& image_path) {
    return std::filesystem::path(image_path).replace_extension(".meta").string();
}

std::string correction_report_text(const CorrectedCode& corrected) {
    const RobustnessReport& r = corrected.correction.report;
    std::ostringstream out;
    out << "# format_version=1\n"
        << "iterations=" << r.iterations << '\n'
        << "registry=" << r.registry.size() << '\n'
        << "omega_sizes=";
    for (std::size_t i = 0; i < r.omega_sizes.size(); ++i) out << (i ? "," : "") << r.omega_sizes[i];
    const auto& radii = corrected.correction.radii;
    out << '\n'
        << "non_robust_at_exit=" << r.non_robust.size() << '\n'
        << "widened_spots="
        << std::count_if(radii.begin(), radii.end(), [&](int v) { return v > corrected.meta.params.spot_radius; })
        << '\n'
        << "delta=" << corrected.meta.params.delta << '\n'
        << "eta=" << corrected.meta.params.eta << '\n'
        << "spot_radius=" << corrected.meta.params.spot_radius << '\n';
    return out.str();
}

void cmd_generate(const GenerateCommand& cmd, std::ostream& log) {
    const GeneratedCode code = generate_code(read_png(cmd.input), to_bytes(cmd.message), cmd.symbol);
    write_png(cmd.output, code.qa);
    const std::string meta_path = cmd.meta_output.empty() ? default_meta_path(cmd.output) : cmd.meta_output;
    write_sidecar(meta_path, code.meta);
    log << "wrote " << cmd.output << " (" << code.qa.width() << "x" << code.qa.height() << ") and " << meta_path << '\n'
        << "target matches: " << count_target_matches(code.schedule.matrix, code.plan) << " scheduled, "
        << code.unscheduled_matches << " unscheduled; free bits " << code.schedule.basis_rank << '\n';
}

void cmd_stylize(const StylizeCommand& cmd, std::ostream& log) {
    const std::string meta_in = cmd.meta.empty() ? default_meta_path(cmd.input) : cmd.meta;
    if (!std::filesystem::exists(meta_in)) throw IoError("sidecar " + meta_in + " not found; refusing to stylize");
    SidecarMeta meta = read_sidecar(meta_in);
    std::optional<StylizerSpec> spec;
    if (!cmd.stylizer.empty()) spec = StylizerSpec::parse(cmd.stylizer);
    const StylizeResult result = stylize_code(read_png(cmd.input), meta, spec, cmd.external);
    meta.provenance.push_back("stylize " + timestamp_now() + " " + result.provenance);
    write_png(cmd.output, result.image);
    const std::string meta_out = cmd.meta_output.empty() ? default_meta_path(cmd.output) : cmd.meta_output;
    write_sidecar(meta_out, meta);
    log << "wrote " << cmd.output << " and " << meta_out << " (" << result.provenance << ")\n";
}

void cmd_correct(const CorrectCommand& cmd, std::ostream& log) {
    const SidecarMeta meta = read_sidecar(cmd.meta.empty() ? default_meta_path(cmd.input) : cmd.meta);
    RobustnessParams params = meta.params;
    if (cmd.delta) params.delta = *cmd.delta;
    if (cmd.radius) params.spot_radius = *cmd.radius;
    if (cmd.eta) params.eta = *cmd.eta;
    params.max_iterations = cmd.max_iterations;
    params.validate(meta.grid);
    const CorrectedCode corrected = correct_code(read_png(cmd.input), meta, params);
    write_png(cmd.output, corrected.correction.qc);
    const std::string meta_out = cmd.meta_output.empty() ? default_meta_path(cmd.output) : cmd.meta_output;
    write_sidecar(meta_out, corrected.meta);
    const std::string report = correction_report_text(corrected);
    if (!cmd.report.empty()) {
        std::ofstream out(cmd.report, std::ios::trunc);
        if (!out || !(out << report)) throw IoError("cannot write report " + cmd.report);
    }
    log << "wrote " << cmd.output << " and " << meta_out << '\n' << report;
}

void cmd_verify(const VerifyCommand& cmd, std::ostream& out) {
    const SidecarMeta meta = read_sidecar(cmd.meta.empty() ? default_meta_path(cmd.input) : cmd.meta);
    const VerifyReport report = verify_code(read_png(cmd.input), meta);
    print_verify_report(out, report, meta);
    if (!report.decode.ok()) throw VerificationFailure("decode failed: " + report.decode.message);
    if (!report.digest_ok) throw VerificationFailure("decoded payload does not match the sidecar digest");
}

void cmd_eval(const EvalCommand& cmd, std::ostream& log) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(cmd.corpus_dir)) throw IoError("corpus directory " + cmd.corpus_dir + " not found");
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(cmd.corpus_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png") images.push_back(entry.path());
    std::sort(images.begin(), images.end());
    if (images.empty()) throw IoError("no PNG images in " + cmd.corpus_dir);

    std::optional<StylizerSpec> stylizer;
    if (!cmd.stylizer.empty()) stylizer = StylizerSpec::parse(cmd.stylizer);
    std::optional<DistortionSpec> distortion;
    if (!cmd.distortion.empty()) distortion = DistortionSpec::parse(cmd.distortion);
    if (distortion && cmd.trials == 0) throw std::invalid_argument("--trials must be at least 1");
    const Bytes payload = to_bytes(cmd.message);

    std::ostringstream csv;
    csv << "# format_version=1\n"
        << "# delta=" << cmd.delta << " stylizer=" << (stylizer ? stylizer->describe() : "none")
        << " distortion=" << (distortion ? distortion->describe() : "none") << " trials=" << cmd.trials
        << " seed=" << cmd.seed << '\n'
        << "image,status,ssim_qa";
    if (cmd.compare_standard) csv << ",ssim_plain,delta_ssim";
    csv << ",errors_qa,errors_qb,errors_qc,registry,iterations";
    if (distortion) csv << ",decode_rate";
    csv << '\n';

    std::size_t ok = 0, improved = 0, rated = 0;
    double ssim_sum = 0.0, rate_sum = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string name = images[i].filename().string();
        std::ostringstream row;
        try {
            const GeneratedCode code = generate_code(read_png(images[i]), payload, cmd.symbol);
            const GrayImage source_gray = to_gray(code.source);
            const double s_qa = ssim(to_gray(core_of(code.qa, code.meta)), source_gray);
            ssim_sum += s_qa;
            row << csv_field(name) << ",ok," << fixed(s_qa, 6);
            if (cmd.compare_standard) {
                const double s_plain = ssim(to_gray(core_of(render_standard(code.meta), code.meta)), source_gray);
                row << ',' << fixed(s_plain, 6) << ',' << fixed(s_qa - s_plain, 6);
                if (s_qa > s_plain) ++improved;
            }
            const QrMatrix& scheduled = code.schedule.matrix;
            const ColorImage qb =
                stylizer ? stylize_code(code.qa, code.meta, stylizer, std::string()).image : code.qa;
            RobustnessParams params = code.meta.params;
            params.delta = cmd.delta;
            const CorrectedCode corrected = correct_code(qb, code.meta, params);
            const ColorImage& qc = corrected.correction.qc;
            row << ',' << error_module_count(code.qa, scheduled, code.meta.grid) << ','
                << error_module_count(qb, scheduled, code.meta.grid) << ','
                << error_module_count(qc, scheduled, code.meta.grid) << ','
                << corrected.correction.report.registry.size() << ',' << corrected.correction.report.iterations;
            if (distortion) {
                const TrialSummary trials = decode_rate_trial(qc, code.meta.grid, code.meta.mask, payload, *distortion,
                                                              cmd.trials, cmd.seed + i);
                row << ',' << fixed(trials.rate(), 4);
                rate_sum += trials.rate();
                ++rated;
            }
            ++ok;
            csv << row.str() << '\n';
        } catch (const Error& e) {
            log << name << ": " << e.what() << '\n';
            csv << csv_field(name) << ",error:" << csv_field(e.what()) << '\n';
        }
    }
    csv << "# summary images=" << images.size() << " completed=" << ok;
    if (ok) csv << " mean_ssim_qa=" << fixed(ssim_sum / static_cast<double>(ok), 6);
    if (cmd.compare_standard) csv << " ssim_improved=" << improved;
    if (rated) csv << " mean_decode_rate=" << fixed(rate_sum / static_cast<double>(rated), 4);
    csv << '\n';

    if (cmd.output.empty()) {
        log << csv.str();
    } else {
        std::ofstream out(cmd.output, std::ios::trunc);
        if (!out || !(out << csv.str())) throw IoError("cannot write " + cmd.output);
        log << "wrote " << cmd.output << " (" << ok << "/" << images.size() << " images)\n";
    }
}

void cmd_corpus(const CorpusCommand& cmd, std::ostream& log) {
    std::filesystem::create_directories(cmd.dir);
    for (int i = 0; i < kCorpusCount; ++i) {
        const auto path = std::filesystem::path(cmd.dir) / (corpus_name(i) + ".png");
        write_png(path, corpus_image(i, cmd.size));
    }
    log << "wrote " << kCorpusCount << " images to " << cmd.dir << '\n';
}

}  // namespace artqr
