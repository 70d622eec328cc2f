#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <memory>

#include "attackbench/errors.hpp"
#include "attackbench/harness.hpp"

namespace attackbench {

std::vector<unsigned char> canonical_sample_bytes(std::span<const double> x) {
  std::vector<unsigned char> bytes;
  bytes.reserve(4 + 4 * x.size());
  const auto put = [&bytes](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
  };
  put(static_cast<std::uint32_t>(x.size()));
  for (double v : x) put(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return bytes;
}

std::string hash_sample(std::span<const double> x) {
  const auto bytes = canonical_sample_bytes(x);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha512(), nullptr) != 1 || len != 64) {
    throw StateError("SHA-512 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = kHex[digest[i] >> 4];
    out[2 * i + 1] = kHex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace attackbench
