#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "attackbench/diffnet.hpp"
#include "attackbench/errors.hpp"

namespace attackbench {
namespace {

constexpr char kMagic[6] = {'A', 'B', 'N', 'E', 'T', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

void put_f32(std::vector<unsigned char>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  double f32() {
    const float f = std::bit_cast<float>(u32());
    if (!std::isfinite(f)) throw FormatError("model file contains a non-finite parameter");
    return static_cast<double>(f);
  }
  void expect_magic() {
    need(sizeof(kMagic));
    if (std::memcmp(bytes_.data() + pos_, kMagic, sizeof(kMagic)) != 0) {
      throw FormatError("not an ABNET1 model file");
    }
    pos_ += sizeof(kMagic);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("model file is truncated");
  }
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_model(const ModelParams& model) {
  model.validate();
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(model.input_dim));
  put_u32(out, static_cast<std::uint32_t>(model.num_classes));
  put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& layer : model.layers) {
    put_u32(out, static_cast<std::uint32_t>(layer.out));
    put_u32(out, static_cast<std::uint32_t>(layer.in));
    out.push_back(layer.activation == Activation::ReLU ? 1 : 0);
  }
  for (const auto& layer : model.layers) {
    for (double w : layer.weights) put_f32(out, w);
    for (double b : layer.bias) put_f32(out, b);
  }
  return out;
}

ModelParams decode_model(std::span<const unsigned char> bytes) {
  if (bytes.empty()) throw FormatError("model file is empty");
  Reader in(bytes);
  in.expect_magic();
  ModelParams model;
  model.input_dim = in.u32();
  model.num_classes = in.u32();
  const std::uint32_t count = in.u32();
  // 9 header bytes per layer; reject absurd counts before allocating.
  if (count == 0 || count > in.remaining() / 9) throw FormatError("model file has an invalid layer count");
  model.layers.resize(count);
  std::size_t width = model.input_dim;
  for (std::uint32_t l = 0; l < count; ++l) {
    auto& layer = model.layers[l];
    layer.out = in.u32();
    layer.in = in.u32();
    const std::uint8_t act = in.u8();
    if (act > 1) throw FormatError("model file has an unknown activation code");
    layer.activation = act == 1 ? Activation::ReLU : Activation::Identity;
    if (layer.in != width) {
      throw FormatError("layer " + std::to_string(l) + " input width " + std::to_string(layer.in) +
                        " does not match previous width " + std::to_string(width));
    }
    width = layer.out;
  }
  std::size_t expected = 0;
  for (const auto& layer : model.layers) expected += (layer.in * layer.out + layer.out) * 4;
  if (in.remaining() != expected) throw FormatError("model file size does not match its layer specs");
  for (auto& layer : model.layers) {
    layer.weights.resize(layer.in * layer.out);
    layer.bias.resize(layer.out);
    for (auto& w : layer.weights) w = in.f32();
    for (auto& b : layer.bias) b = in.f32();
  }
  model.validate();
  return model;
}

void save_model(const ModelParams& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

}  // namespace attackbench
