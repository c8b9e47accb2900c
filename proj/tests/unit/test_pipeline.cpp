// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "artqr/corpus.hpp"
#include "artqr/errors.hpp"
#include "artqr/png_io.hpp"
#include "artqr/pipeline.hpp"
#include "artqr/sidecar.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace artqr;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("sha256 known answers") {
        const std::string abc = "abc";
        CHECK(sha256_hex(Bytes(abc.begin(), abc.end())) ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(sha256_hex(Bytes{}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    TEST_CASE("timestamps honor SOURCE_DATE_EPOCH") {
        setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
        CHECK(timestamp_now() == "2023-11-14T22:13:20Z");
        unsetenv("SOURCE_DATE_EPOCH");
        CHECK(timestamp_now().size() == 20);
    }

    TEST_CASE("sidecar text round trip and rejection of bad documents") {
        SymbolOptions opt;
        opt.mask = 6;
        const GeneratedCode code = generate_code(testing::corpus(1), testing::message_bytes(), opt);
        SidecarMeta meta = code.meta;
        meta.params.delta = 0.15;
        meta.provenance.push_back("stylize 2024-01-01T00:00:00Z builtin:soften:sigma=2");
        const std::string text = sidecar_to_text(meta);
        CHECK(text.rfind("format_version=1\n", 0) == 0);
        const SidecarMeta back = sidecar_from_text(text);
        CHECK(back.dark_bits == meta.dark_bits);
        CHECK(back.grid == meta.grid);
        CHECK(back.mask == 6);
        CHECK(back.level == EcLevel::L);
        CHECK(back.payload_sha256 == meta.payload_sha256);
        CHECK(back.params.delta == doctest::Approx(0.15));
        CHECK(back.provenance == meta.provenance);
        CHECK(sidecar_to_text(back) == text);
        CHECK(back.scheduled() == code.schedule.matrix);

        CHECK_THROWS_AS(sidecar_from_text("format_version=2\n"), std::invalid_argument);
        CHECK_THROWS_AS(sidecar_from_text(""), std::invalid_argument);
        std::string truncated = text;
        const auto pos = truncated.find("bits=");
        truncated = truncated.substr(0, pos + 20) + "\n";
        CHECK_THROWS_AS(sidecar_from_text(truncated), std::invalid_argument);
    }

    TEST_CASE("generated codes: geometry, scheduling stats and decodability") {
        SymbolOptions opt;
        const GeneratedCode code = generate_code(testing::corpus(4), testing::message_bytes(), opt);
        CHECK(code.qa.width() == 585);
        CHECK(code.qa.height() == 585);
        CHECK(code.meta.grid.origin_x == 52);
        CHECK(code.meta.params.spot_radius == 3);
        CHECK(count_target_matches(code.schedule.matrix, code.plan) >= code.unscheduled_matches);
        const VerifyReport v = verify_code(code.qa, code.meta);
        CHECK(v.ok());
        CHECK(v.decode.result.corrections == 0);
        CHECK(v.error_modules == 0);

        opt.module_px = 9;
        opt.mask = 3;
        const GeneratedCode small = generate_code(testing::corpus(4), testing::message_bytes(), opt);
        CHECK(small.qa.width() == 405);
        CHECK(core_of(small.qa, small.meta).width() == 333);
        CHECK(small.meta.params.spot_radius == 2);
        CHECK(verify_code(small.qa, small.meta).ok());

        opt.mask = 9;
        CHECK_THROWS_AS(generate_code(testing::corpus(4), testing::message_bytes(), opt), std::invalid_argument);
        CHECK_THROWS_AS(generate_code(testing::corpus(4), testing::message_bytes(std::string(200, 'a')), SymbolOptions{}),
                        CapacityExceeded);
    }

    TEST_CASE("identity stylization returns the blended code") {
        const GeneratedCode code = generate_code(testing::corpus(2), testing::message_bytes(), SymbolOptions{});
        const StylizeResult r = stylize_code(code.qa, code.meta, StylizerSpec::parse("identity"), "");
        CHECK(r.image == code.qa);
        CHECK_THROWS_AS(stylize_code(code.qa, code.meta, std::nullopt, ""), std::invalid_argument);
        CHECK_THROWS_AS(stylize_code(ColorImage(100, 100), code.meta, StylizerSpec::parse("identity"), ""),
                        DimensionMismatch);
    }

    TEST_CASE("verification reports a digest mismatch") {
        const GeneratedCode code = generate_code(testing::corpus(2), testing::message_bytes(), SymbolOptions{});
        SidecarMeta meta = code.meta;
        meta.payload_sha256 = std::string(64, '0');
        const VerifyReport v = verify_code(code.qa, meta);
        CHECK(v.decode.ok());
        CHECK_FALSE(v.digest_ok);
        std::ostringstream out;
        print_verify_report(out, verify_code(code.qa, code.meta), code.meta);
        CHECK(out.str().find("status: ok") != std::string::npos);
        CHECK(out.str().find("rs_corrections: 0") != std::string::npos);
    }

    TEST_CASE("command layer: files, sidecars and failures") {
        testing::TempDir dir;
        write_png(dir.path("in.png"), testing::corpus(7));
        GenerateCommand gen;
        gen.message = testing::kMessage;
        gen.input = dir.path("in.png");
        gen.output = dir.path("qa.png");
        std::ostringstream log;
        cmd_generate(gen, log);
        CHECK(std::filesystem::exists(dir.path("qa.meta")));
        CHECK(default_meta_path("/x/y/code.png") == "/x/y/code.meta");

        StylizeCommand sty;
        sty.input = gen.output;
        sty.output = dir.path("qb.png");
        sty.stylizer = "posterize";
        cmd_stylize(sty, log);
        CHECK(slurp(dir.path("qb.meta")).find("builtin:posterize") != std::string::npos);

        CorrectCommand cor;
        cor.input = sty.output;
        cor.output = dir.path("qc.png");
        cor.report = dir.path("report.txt");
        cor.delta = 0.2;
        cmd_correct(cor, log);
        CHECK(slurp(cor.report).rfind("# format_version=1", 0) == 0);

        VerifyCommand ver{cor.output, ""};
        std::ostringstream out;
        CHECK_NOTHROW(cmd_verify(ver, out));

        // stylizing without a sidecar is refused
        write_png(dir.path("orphan.png"), read_png(gen.output));
        StylizeCommand orphan = sty;
        orphan.input = dir.path("orphan.png");
        orphan.output = dir.path("orphan-out.png");
        CHECK_THROWS_AS(cmd_stylize(orphan, log), IoError);

        // truncated PNG
        const std::string bytes = slurp(gen.output);
        std::ofstream(dir.path("broken.png"), std::ios::binary) << bytes.substr(0, bytes.size() / 2);
        CHECK_THROWS_AS(read_png(dir.path("broken.png")), IoError);
        CHECK_THROWS_AS(read_png(dir.path("missing.png")), IoError);

        // a plain white image with the sidecar fails verification
        write_png(dir.path("blank.png"), ColorImage(585, 585, Rgb{255, 255, 255}));
        VerifyCommand blank{dir.path("blank.png"), dir.path("qa.meta")};
        CHECK_THROWS_AS(cmd_verify(blank, out), VerificationFailure);
    }

    TEST_CASE("PNG round trip") {
        testing::TempDir dir;
        std::mt19937_64 rng(1);
        const ColorImage img = testing::random_color_image(rng, 33, 17);
        write_png(dir.path("a.png"), img);
        CHECK(read_png(dir.path("a.png")) == img);
    }

    TEST_CASE("corpus images are deterministic and distinct") {
        CHECK(kCorpusCount == 20);
        const ColorImage a = corpus_image(3, 96);
        CHECK(a == corpus_image(3, 96));
        CHECK(a.width() == 96);
        CHECK_FALSE(a == corpus_image(4, 96));
        CHECK(corpus_name(0) == "00-radial");
        CHECK(corpus_name(19) == "19-marble");
    }
}
