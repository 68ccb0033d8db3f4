#include <gtest/gtest.h>

#include "mplab/choice_string.hpp"
#include "mplab/error.hpp"

using namespace mplab;

TEST(ChoiceString, ParsesPrintedForms) {
    EXPECT_EQ(parse_choice_string("SSSSSSS / RRR", DesignKind::HL).response, 7);
    EXPECT_EQ(parse_choice_string("/1/000000000", DesignKind::BINS).response, 1);
    EXPECT_EQ(parse_choice_string("0000000/1/00", DesignKind::BINS).response, 8);
    EXPECT_EQ(parse_choice_string("CCCC / UUUUUU", DesignKind::CVU).response, 4);
    EXPECT_EQ(parse_choice_string("SSSSSSSSSS /", DesignKind::HL).response, 10);
    EXPECT_EQ(parse_choice_string("/ RRRRRRRRRR", DesignKind::HL).response, 0);
    EXPECT_EQ(parse_choice_string("ssss/rrrrrr", DesignKind::HL).response, 4);
}

TEST(ChoiceString, LengthAnomalyIsAWarningNotAnError) {
    const auto p = parse_choice_string("SSSSS / RRRR", DesignKind::HL);
    EXPECT_EQ(p.response, 5);
    EXPECT_EQ(p.symbol_count, 9);
    EXPECT_TRUE(p.length_anomaly);
    EXPECT_FALSE(parse_choice_string("SSSSS / RRRRR", DesignKind::HL).length_anomaly);
}

TEST(ChoiceString, RejectsMalformedWithPosition) {
    try {
        parse_choice_string("SRS / RRRRRRR", DesignKind::HL);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 1u);
    }
    try {
        parse_choice_string("SSSS / RRSRRR", DesignKind::HL);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 9u);
    }
    EXPECT_THROW(parse_choice_string("SSSS RRRRRR", DesignKind::HL), ParseError);
    EXPECT_THROW(parse_choice_string("SSSS / UUUUUU", DesignKind::HL), ParseError);
    EXPECT_THROW(parse_choice_string("SS/ / RRRRRR", DesignKind::HL), ParseError);
    EXPECT_THROW(parse_choice_string("00/1/00/1/00", DesignKind::BINS), ParseError);
    EXPECT_THROW(parse_choice_string("0000000000", DesignKind::BINS), ParseError);
    EXPECT_THROW(parse_choice_string("00000000000/1/", DesignKind::BINS), ParseError);
    EXPECT_THROW(parse_choice_string("   ", DesignKind::CVU), ParseError);
    EXPECT_THROW(parse_choice_string("SSSSSSSSSSS /", DesignKind::HL), ParseError);
}

TEST(ChoiceString, RenderParseRoundTripAllResponses) {
    for (auto kind : {DesignKind::HL, DesignKind::CVU}) {
        for (int n = 0; n <= 10; ++n) {
            const auto s = render_choice_string(n, kind);
            const auto p = parse_choice_string(s, kind);
            EXPECT_EQ(p.response, n) << s;
            EXPECT_FALSE(p.length_anomaly) << s;
        }
    }
    for (int d = 1; d <= 10; ++d) {
        const auto s = render_choice_string(d, DesignKind::BINS);
        EXPECT_EQ(parse_choice_string(s, DesignKind::BINS).response, d) << s;
    }
    EXPECT_EQ(render_choice_string(6, DesignKind::HL), "SSSSSS / RRRR");
    EXPECT_EQ(render_choice_string(10, DesignKind::HL), "SSSSSSSSSS /");
    EXPECT_EQ(render_choice_string(0, DesignKind::CVU), "/ UUUUUUUUUU");
    EXPECT_EQ(render_choice_string(4, DesignKind::BINS), "000/1/000000");
    EXPECT_THROW(render_choice_string(0, DesignKind::BINS), InvalidArgument);
    EXPECT_THROW(render_choice_string(11, DesignKind::HL), InvalidArgument);
}
