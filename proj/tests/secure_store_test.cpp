#include <gtest/gtest.h>

#include <random>

#include "procfeed/secure_store.hpp"

using namespace procfeed;
using namespace procfeed::secure;

namespace {

// Low iteration count keeps the bulk tests fast; the count travels in the
// header so nothing else changes.
constexpr std::uint32_t kFast = 1000;

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& x : b) x = static_cast<std::uint8_t>(byte(rng));
    return b;
}

ErrorCode decrypt_error(const Bytes& c, std::string_view pass) {
    try {
        decrypt(c, pass);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "decryption unexpectedly succeeded";
    return ErrorCode::Io;
}

} // namespace

TEST(SecureStore, RoundTripWithDefaultParameters) {
    const auto c = encrypt(std::string_view("procfeed-session 1\n"), "correct horse");
    EXPECT_EQ(c.size(), kHeaderSize + 19 + kTagSize);
    EXPECT_TRUE(is_container(c));
    EXPECT_EQ(detail::get_u32(c.data() + 4 + kSaltSize), kDefaultIterations);
    EXPECT_EQ(to_string(decrypt(c, "correct horse")), "procfeed-session 1\n");
}

TEST(SecureStore, EmptyPayload) {
    const auto c = encrypt(std::string_view(""), "pw", kFast);
    EXPECT_TRUE(decrypt(c, "pw").empty());
}

TEST(SecureStore, FreshSaltAndNonceEveryTime) {
    const auto a = encrypt(std::string_view("same bytes"), "pw", kFast);
    const auto b = encrypt(std::string_view("same bytes"), "pw", kFast);
    EXPECT_NE(a, b);
    EXPECT_FALSE(std::equal(a.begin() + 4, a.begin() + 4 + kSaltSize, b.begin() + 4));
}

TEST(SecureStore, EmptyPasscodeRejected) {
    try {
        encrypt(std::string_view("x"), "");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyPasscode);
    }
}

TEST(SecureStore, WrongPasscode) {
    const auto c = encrypt(std::string_view("secret"), "right", kFast);
    EXPECT_EQ(decrypt_error(c, "wrong"), ErrorCode::WrongPasscodeOrTampered);
    EXPECT_EQ(decrypt_error(c, ""), ErrorCode::WrongPasscodeOrTampered);
}

TEST(SecureStore, TamperDetection) {
    std::mt19937_64 rng(61);
    const auto c = encrypt(random_bytes(rng, 300), "pw", kFast);
    // Salt, nonce, ciphertext and tag regions all authenticate.
    for (std::size_t pos : {std::size_t{4}, std::size_t{19}, kHeaderSize - 1, kHeaderSize + 5, c.size() - 1}) {
        auto bad = c;
        bad[pos] ^= 0x01;
        EXPECT_EQ(decrypt_error(bad, "pw"), ErrorCode::WrongPasscodeOrTampered) << "byte " << pos;
    }
}

TEST(SecureStore, MalformedContainers) {
    const auto c = encrypt(std::string_view("payload"), "pw", kFast);
    EXPECT_EQ(decrypt_error(Bytes(c.begin(), c.begin() + 20), "pw"), ErrorCode::MalformedContainer);
    EXPECT_EQ(decrypt_error(Bytes{}, "pw"), ErrorCode::MalformedContainer);
    auto bad_magic = c;
    bad_magic[0] = 'X';
    EXPECT_EQ(decrypt_error(bad_magic, "pw"), ErrorCode::MalformedContainer);
    auto huge_kdf = c;
    huge_kdf[4 + kSaltSize] = 0xFF;
    EXPECT_EQ(decrypt_error(huge_kdf, "pw"), ErrorCode::MalformedContainer);
}

TEST(SecureStore, KdfParametersComeFromHeader) {
    const auto c = encrypt(std::string_view("old file"), "pw", 2000);
    EXPECT_EQ(detail::get_u32(c.data() + 4 + kSaltSize), 2000u);
    EXPECT_EQ(to_string(decrypt(c, "pw")), "old file");
}

TEST(SecureStore, LargePayload) {
    std::mt19937_64 rng(67);
    const auto big = random_bytes(rng, 10u << 20);
    EXPECT_EQ(decrypt(encrypt(big, "pw", kFast), "pw"), big);
}
