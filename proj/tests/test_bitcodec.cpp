#include "adl/bitcodec.hpp"
#include "adl/error.hpp"
#include "adl/rng.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace adl;

TEST(Gamma, KnownCodes) {
    EXPECT_EQ(encode_gamma(0).to_string(), "1");
    EXPECT_EQ(encode_gamma(1).to_string(), "010");
    EXPECT_EQ(encode_gamma(3).to_string(), "00100");
    EXPECT_EQ(encode_gamma(6).to_string(), "00111");
}

TEST(Gamma, ExhaustiveRoundTripAndLength) {
    for (std::uint64_t n = 0; n < (1u << 20); ++n) {
        BitString b = encode_gamma(n);
        std::size_t expect = 1;
        for (std::uint64_t v = n + 1; v > 1; v >>= 1) expect += 2;
        ASSERT_EQ(b.size(), expect) << n;
        ASSERT_EQ(gamma_length(n), expect) << n;
        ASSERT_EQ(decode_gamma(b), n) << n;
    }
}

TEST(Gamma, PrefixFreeOnConcatenation) {
    Rng rng = make_stream(11, 0);
    BitString all;
    std::vector<std::uint64_t> values;
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t n = rng() >> (rng() % 64);
        values.push_back(n);
        all.append(encode_gamma(n));
    }
    BitReader r(all);
    for (auto n : values) ASSERT_EQ(r.read_gamma(), n);
    EXPECT_TRUE(r.at_end());
}

TEST(Fixed, KnownAndRoundTrip) {
    EXPECT_EQ(encode_fixed(5, 4).to_string(), "0101");
    EXPECT_EQ(encode_fixed(0, 0).size(), 0u);
    EXPECT_THROW(encode_fixed(16, 4), DomainError);
    for (std::uint64_t n = 0; n < 256; ++n) EXPECT_EQ(decode_fixed(encode_fixed(n, 8)), n);
}

TEST(SignedGamma, SignBitThenMagnitude) {
    EXPECT_EQ(encode_signed_gamma(0).to_string(), "01");
    EXPECT_EQ(encode_signed_gamma(-3).to_string(), "100100");
    for (std::int64_t n = -300; n <= 300; ++n) {
        MessageWriter w;
        w.signed_gamma(n);
        FramedMessage m = w.finish();
        EXPECT_EQ(m.symbol_count(), signed_gamma_length(n));
        MessageReader r(m);
        EXPECT_EQ(r.signed_gamma(), n);
    }
}

TEST(Zigzag, Bijection) {
    for (std::int64_t n = -1000; n <= 1000; ++n) EXPECT_EQ(unzigzag(zigzag(n)), n);
    EXPECT_EQ(zigzag(0), 0u);
    EXPECT_EQ(zigzag(-1), 1u);
    EXPECT_EQ(zigzag(1), 2u);
}

TEST(Bijective, LengthAndRoundTripInsideFrame) {
    for (std::uint64_t z = 0; z < 5000; ++z) {
        std::size_t len = 0;
        for (std::uint64_t v = z + 1; v > 1; v >>= 1) ++len;
        EXPECT_EQ(bijective_length(z), len);
        MessageWriter w;
        w.open();
        w.bijective(z);
        w.close();
        FramedMessage m = w.finish();
        MessageReader r(m);
        r.open();
        EXPECT_EQ(r.bijective(), z);
        r.close();
        r.expect_end();
    }
}

TEST(Frame, EmptyFrameIsFourBits) {
    std::vector<BitString> none;
    FramedMessage f = frame(std::span<const BitString>(none));
    EXPECT_EQ(f.physical_bits(), 4u);
    EXPECT_EQ(f.to_bits().to_string(), "1011");
}

TEST(Frame, LengthIsTwicePayloadPlusFour) {
    Rng rng = make_stream(12, 0);
    for (int t = 0; t < 100; ++t) {
        std::vector<BitString> kids;
        std::size_t total = 0;
        for (int c = 0; c < 1 + static_cast<int>(rng() % 5); ++c) {
            BitString b = encode_gamma(rng() % 1000);
            total += b.size();
            kids.push_back(b);
        }
        FramedMessage f = frame(std::span<const BitString>(kids));
        EXPECT_EQ(f.physical_bits(), 2 * total + 4);
        EXPECT_TRUE(f.balanced());
    }
}

TEST(Frame, NestedGammaPairRoundTrips) {
    MessageWriter w;
    w.open();
    w.open();
    w.gamma(17);
    w.close();
    w.open();
    w.gamma(0);
    w.close();
    w.close();
    FramedMessage m = w.finish();
    EXPECT_EQ(m.child_frame_count(), 2u);
    FramedMessage back = FramedMessage::from_bits(m.to_bits());
    EXPECT_EQ(back, m);
    MessageReader r(back);
    r.open();
    r.open();
    EXPECT_EQ(r.gamma(), 17u);
    r.close();
    r.open();
    EXPECT_EQ(r.gamma(), 0u);
    r.close();
    r.close();
    r.expect_end();
}

TEST(Frame, TruncatedStreamReportsOffset) {
    MessageWriter w;
    w.open();
    w.gamma(100);
    w.close();
    FramedMessage m = w.finish();
    std::vector<Symbol> cut(m.symbols().begin(), m.symbols().end() - 3);
    FramedMessage t(cut);
    MessageReader r(t);
    r.open();
    try {
        r.gamma();
        r.close();
        FAIL() << "expected DecodeError";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.bit_offset() % 2, 0u);
        EXPECT_LE(e.bit_offset(), 2 * cut.size());
    }
    EXPECT_THROW(FramedMessage::from_bits(BitString::from_string("101")), DecodeError);
}

TEST(Frame, UnclosedFrameRejected) {
    MessageWriter w;
    w.open();
    w.bit(true);
    EXPECT_THROW(w.finish(), Error);
}

TEST(BitString, HexRoundTrip) {
    Rng rng = make_stream(13, 0);
    for (int t = 0; t < 200; ++t) {
        BitString b;
        std::size_t n = rng() % 70;
        for (std::size_t i = 0; i < n; ++i) b.push_back(rng() & 1);
        EXPECT_EQ(BitString::from_hex(b.to_hex(), b.size()), b);
    }
    EXPECT_EQ(BitString::from_string("1010000011").to_hex(), "a0c0");
}

TEST(BitString, ConcatenationAssociativeAndAdditive) {
    BitString a = BitString::from_string("101"), b = BitString::from_string("0011"), c = BitString::from_string("1");
    BitString ab = a;
    ab.append(b);
    ab.append(c);
    BitString bc = b;
    bc.append(c);
    BitString a_bc = a;
    a_bc.append(bc);
    EXPECT_EQ(ab, a_bc);
    EXPECT_EQ(ab.size(), a.size() + b.size() + c.size());
}

TEST(Message, PrefixFreeAcrossRandomFramedMessages) {
    Rng rng = make_stream(14, 0);
    for (int t = 0; t < 300; ++t) {
        auto make = [&]() {
            MessageWriter w;
            w.open();
            int n = static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) w.gamma(rng() % 50);
            w.close();
            return w.finish().to_bits();
        };
        BitString x = make(), y = make();
        if (x == y) continue;
        std::size_t k = std::min(x.size(), y.size());
        bool x_prefix_of_y = true;
        for (std::size_t i = 0; i < k; ++i) x_prefix_of_y = x_prefix_of_y && x[i] == y[i];
        EXPECT_FALSE(x_prefix_of_y && x.size() != y.size());
    }
}
