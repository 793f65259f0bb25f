#include <gtest/gtest.h>

#include "blockshift_lab/io.hpp"
#include "support/generators.hpp"

namespace bl = blockshift_lab;
namespace io = bl::io;
using bl::cplx;
namespace seq = bl::seq;
using io::json;

namespace {

void expect_same_values(const bl::SequenceSpec& a, const bl::SequenceSpec& b, bl::Index lo, bl::Index hi) {
    // outside the domain both must throw
    for (bl::Index n = lo; n <= hi; ++n) {
        std::optional<cplx> x, y;
        try {
            x = a(n);
        } catch (const bl::Error&) {
        }
        try {
            y = b(n);
        } catch (const bl::Error&) {
        }
        EXPECT_EQ(x, y) << "n=" << n;
    }
}

}  // namespace

TEST(Json, ComplexAcceptsBareNumbersAndRejectsExtraFields) {
    EXPECT_EQ(io::complex_from_json(json(2.5)), cplx(2.5, 0.0));
    EXPECT_EQ(io::complex_from_json(json{{"im", -1.0}}), cplx(0.0, -1.0));
    EXPECT_THROW(io::complex_from_json(json{{"re", 1.0}, {"imag", 2.0}}), bl::ConfigError);
    EXPECT_EQ(io::complex_from_json(io::to_json(cplx(0.25, -3.5))), cplx(0.25, -3.5));
}

TEST(Json, SequenceRoundTripsEveryKind) {
    const std::vector<bl::SequenceSpec> specs = {
        seq::constant(cplx(1.0, 2.0)),
        seq::table({{0, 5.0}, {-1, 7.0}}, cplx(1.0)),
        seq::mobius_rational(0.5, 0.5, cplx(0.0, 1.0)),
        seq::sqrt_ratio(0.25, 0.75),
        seq::periodic({1.0, cplx(0.0, 3.0)}),
        seq::reciprocal_of(seq::sqrt_ratio(0.3, 0.7)),
        seq::negated_shifted_reflection(seq::table({{0, 5.0}, {-1, 7.0}}), 1),
        seq::product(seq::constant(0.5), seq::polynomial({1.0, 0.0, 1.0})),
        seq::sqrt_abs_quotient(seq::affine(0.3), seq::affine(0.7)),
    };
    for (const auto& s : specs) {
        const json j = io::to_json(s);
        const auto back = io::sequence_from_json(json::parse(j.dump()));
        EXPECT_EQ(io::to_json(back), j);
        expect_same_values(s, back, -3, 3);
    }
}

TEST(Json, SequenceTableObjectKeysAndErrors) {
    const auto s = io::sequence_from_json(json::parse(R"({"kind":"table","entries":{"0":5,"-1":7}})"));
    EXPECT_EQ(s(-1), cplx(7.0));
    EXPECT_THROW(io::sequence_from_json(json::parse(R"({"kind":"table","entries":{"x":5}})")), bl::ConfigError);
    EXPECT_THROW(io::sequence_from_json(json::parse(R"({"kind":"constant","value":1,"extra":0})")), bl::ConfigError);
    EXPECT_THROW(io::sequence_from_json(json::parse(R"({"kind":"spline"})")), bl::ConfigError);
}

TEST(Json, OperatorShorthandAndGeneralForm) {
    testgen::Gen g(81);
    const auto gen = g.general(-3, 3);
    const auto back = io::operator_from_json(json::parse(io::to_json(gen).dump()));
    EXPECT_FALSE(back.class_td());
    expect_same_values(gen.w, back.w, -3, 3);
    expect_same_values(gen.d, back.d, -3, 3);
    const auto td = io::operator_from_json(json::parse(R"({"t":{"kind":"constant","value":2},"d":{"kind":"constant","value":1}})"));
    EXPECT_TRUE(td.class_td());
    EXPECT_EQ(td.v(0), cplx(0.5));
    const json both = json::parse(R"({"t":{"kind":"constant","value":2},"w":{"kind":"constant","value":2},"d":{"kind":"constant","value":1}})");
    EXPECT_THROW(io::operator_from_json(both), bl::ConfigError);
}

TEST(Json, KernelRoundTripAndTruncationBounds) {
    const auto k = bl::KernelSpec::product(bl::KernelSpec::lambda(2.0), bl::KernelSpec::gamma(-1.0));
    const json j = io::to_json(k);
    EXPECT_EQ(io::to_json(io::kernel_from_json(json::parse(j.dump()))), j);
    EXPECT_THROW(io::kernel_from_json(json::parse(R"({"kind":"lambda","lambda":1,"truncation":0})")), bl::ConfigError);
    EXPECT_THROW(io::kernel_from_json(json::parse(R"({"kind":"lambda","lambda":1,"order":3})")), bl::ConfigError);
}

TEST(Json, MatrixRoundTripAndRaggedRows) {
    testgen::Gen g(82);
    const bl::MatX m = g.matrix(3);
    EXPECT_EQ(io::matrix_from_json(json::parse(io::matrix_to_json(m).dump())), m);
    EXPECT_THROW(io::matrix_from_json(json::parse("[[1,2],[3]]")), bl::ConfigError);
    EXPECT_THROW(io::matrix_from_json(json::parse("[]")), bl::ConfigError);
}

TEST(Window, ParseAndJson) {
    const auto w = io::parse_window("-40:40");
    EXPECT_EQ(w.n_min(), -40);
    EXPECT_EQ(w.n_max(), 40);
    EXPECT_EQ(io::window_from_json(io::to_json(w)).n_max(), 40);
    EXPECT_EQ(io::parse_window("-5:-2").n_max(), -2);
    EXPECT_THROW(io::parse_window("3"), bl::ConfigError);
    EXPECT_THROW(io::parse_window("a:b"), bl::ConfigError);
    EXPECT_THROW(io::parse_window("1:2x"), bl::ConfigError);
    EXPECT_THROW(io::window_from_json(json::parse("[1.5, 2]")), bl::ConfigError);
}

TEST(Hash, FnvKnownVectors) {
    EXPECT_EQ(io::fnv1a64(""), "cbf29ce484222325");
    EXPECT_EQ(io::fnv1a64("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(io::fnv1a64("foobar"), "85944171f73967e8");
}

TEST(Json, ParseErrorsCarryPosition) {
    try {
        io::parse_json("{\"a\": }", "inline");
        FAIL() << "expected ConfigError";
    } catch (const bl::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    }
    EXPECT_THROW(io::load_json("/nonexistent/case.json"), bl::ConfigError);
}
