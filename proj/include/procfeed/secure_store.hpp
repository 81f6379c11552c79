#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include "errors.hpp"

namespace procfeed::secure {

// Container layout (integers big-endian):
//
//   magic       4 bytes  "PFB1"
//   salt       16 bytes  PBKDF2-HMAC-SHA256 salt
//   iterations  4 bytes  PBKDF2 iteration count
//   nonce      12 bytes  AES-256-GCM IV
//   ciphertext  n bytes
//   tag        16 bytes  GCM tag; the 36 header bytes are authenticated too

inline constexpr std::array<std::uint8_t, 4> kMagic{'P', 'F', 'B', '1'};
inline constexpr std::size_t kSaltSize = 16;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kKeySize = 32;
inline constexpr std::size_t kHeaderSize = kMagic.size() + kSaltSize + 4 + kNonceSize;
inline constexpr std::uint32_t kDefaultIterations = 310000;
/// Upper bound accepted when reading; guards against a damaged count
/// stalling the key derivation.
inline constexpr std::uint32_t kMaxIterations = 10'000'000;

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(std::span<const std::uint8_t> b) { return std::string(b.begin(), b.end()); }

inline bool is_container(std::span<const std::uint8_t> data) {
    return data.size() >= kMagic.size() && std::equal(kMagic.begin(), kMagic.end(), data.begin());
}

namespace detail {

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

/// Key material wiped on destruction.
struct Key {
    std::array<std::uint8_t, kKeySize> bytes{};
    ~Key() { OPENSSL_cleanse(bytes.data(), bytes.size()); }
};

inline Key derive_key(std::string_view passcode, std::span<const std::uint8_t> salt, std::uint32_t iterations) {
    Key key;
    if (PKCS5_PBKDF2_HMAC(passcode.data(), static_cast<int>(passcode.size()), salt.data(),
                          static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                          static_cast<int>(key.bytes.size()), key.bytes.data()) != 1) {
        throw Error(ErrorCode::Io, "key derivation failed");
    }
    return key;
}

inline std::uint8_t* put_u32(std::uint8_t* out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) *out++ = static_cast<std::uint8_t>(v >> shift);
    return out;
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

inline void random_fill(std::span<std::uint8_t> out) {
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) throw Error(ErrorCode::Io, "RAND_bytes failed");
}

[[noreturn]] inline void crypto_failure(const char* what) { throw Error(ErrorCode::Io, what); }

} // namespace detail

/// Encrypts `plaintext` under a key derived from `passcode`. Salt and nonce
/// are fresh for every call.
inline Bytes encrypt(std::span<const std::uint8_t> plaintext, std::string_view passcode,
                     std::uint32_t iterations = kDefaultIterations) {
    using namespace detail;
    if (passcode.empty()) throw Error(ErrorCode::EmptyPasscode, "passcode must not be empty");
    if (iterations == 0 || iterations > kMaxIterations) throw std::invalid_argument("unsupported iteration count");

    std::array<std::uint8_t, kSaltSize> salt{};
    std::array<std::uint8_t, kNonceSize> nonce{};
    random_fill(salt);
    random_fill(nonce);
    const Key key = derive_key(passcode, salt, iterations);

    Bytes out(kHeaderSize + plaintext.size() + kTagSize);
    auto* p = std::copy(kMagic.begin(), kMagic.end(), out.data());
    p = std::copy(salt.begin(), salt.end(), p);
    p = put_u32(p, iterations);
    std::copy(nonce.begin(), nonce.end(), p);

    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) crypto_failure("EVP_CIPHER_CTX_new failed");
    int len = 0;
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonceSize), nullptr) != 1 ||
        EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), nonce.data()) != 1 ||
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, out.data(), static_cast<int>(kHeaderSize)) != 1) {
        crypto_failure("encryption setup failed");
    }

    std::uint8_t* cipher = out.data() + kHeaderSize;
    // EVP_EncryptUpdate takes int lengths; feed large payloads in chunks.
    constexpr std::size_t kChunk = 1u << 30;
    std::size_t done = 0;
    while (done < plaintext.size()) {
        const std::size_t n = std::min(kChunk, plaintext.size() - done);
        if (EVP_EncryptUpdate(ctx.get(), cipher + done, &len, plaintext.data() + done, static_cast<int>(n)) != 1) {
            crypto_failure("encryption failed");
        }
        done += static_cast<std::size_t>(len);
    }
    if (EVP_EncryptFinal_ex(ctx.get(), cipher + done, &len) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagSize), cipher + plaintext.size()) !=
            1) {
        crypto_failure("encryption finalization failed");
    }
    return out;
}

inline Bytes encrypt(std::string_view plaintext, std::string_view passcode,
                     std::uint32_t iterations = kDefaultIterations) {
    return encrypt(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(plaintext.data()),
                                                 plaintext.size()),
                   passcode, iterations);
}

/// Authenticates and decrypts a container. A wrong passcode and a modified
/// container are reported identically.
inline Bytes decrypt(std::span<const std::uint8_t> container, std::string_view passcode) {
    using namespace detail;
    if (container.size() < kHeaderSize + kTagSize) throw Error(ErrorCode::MalformedContainer, "container too short");
    if (!is_container(container)) throw Error(ErrorCode::MalformedContainer, "bad container magic");

    const auto salt = container.subspan(kMagic.size(), kSaltSize);
    const std::uint32_t iterations = get_u32(container.data() + kMagic.size() + kSaltSize);
    const auto nonce = container.subspan(kMagic.size() + kSaltSize + 4, kNonceSize);
    if (iterations == 0 || iterations > kMaxIterations) {
        throw Error(ErrorCode::MalformedContainer, "iteration count out of range");
    }
    if (passcode.empty()) throw Error(ErrorCode::WrongPasscodeOrTampered, "authentication failed");

    const std::size_t cipher_size = container.size() - kHeaderSize - kTagSize;
    const auto cipher = container.subspan(kHeaderSize, cipher_size);
    Bytes tag(container.end() - kTagSize, container.end());
    const Key key = derive_key(passcode, salt, iterations);

    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) crypto_failure("EVP_CIPHER_CTX_new failed");
    int len = 0;
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonceSize), nullptr) != 1 ||
        EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), nonce.data()) != 1 ||
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, container.data(), static_cast<int>(kHeaderSize)) != 1) {
        crypto_failure("decryption setup failed");
    }

    Bytes plain(cipher_size + 16);
    constexpr std::size_t kChunk = 1u << 30;
    std::size_t done = 0;
    while (done < cipher_size) {
        const std::size_t n = std::min(kChunk, cipher_size - done);
        if (EVP_DecryptUpdate(ctx.get(), plain.data() + done, &len, cipher.data() + done, static_cast<int>(n)) != 1) {
            crypto_failure("decryption failed");
        }
        done += static_cast<std::size_t>(len);
    }
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagSize), tag.data()) != 1) {
        crypto_failure("decryption setup failed");
    }
    if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + done, &len) != 1) {
        OPENSSL_cleanse(plain.data(), plain.size());
        throw Error(ErrorCode::WrongPasscodeOrTampered, "authentication failed");
    }
    plain.resize(cipher_size);
    return plain;
}

} // namespace procfeed::secure
