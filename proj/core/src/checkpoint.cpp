// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#include "arollout/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "arollout/error.hpp"

namespace arollout {

namespace {

constexpr std::string_view kMagic = "ARPT";

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <typename UInt>
UInt get_le(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(UInt)) throw FormatError("checkpoint is truncated");
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += sizeof(UInt);
  return value;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string build_header(const Checkpoint& ck) {
  const ForecasterDims& d = ck.model.dims();
  std::ostringstream h;
  h << "kind=" << to_string(ck.model.kind()) << '\n'
    << "context=" << d.context << '\n'
    << "overlap=" << d.overlap << '\n'
    << "block=" << d.block << '\n'
    << "variates=" << d.variates << '\n'
    << "hidden=" << d.hidden << '\n'
    << "steps=" << ck.rollout.steps << '\n'
    << "gamma=" << fmt_double(ck.rollout.gamma) << '\n'
    << "beta=" << fmt_double(ck.rollout.beta) << '\n'
    << "objective=" << to_string(ck.objective) << '\n'
    << "norm_policy=" << ck.norm_policy << '\n'
    << "epoch=" << ck.epoch << '\n'
    << "val_loss=" << fmt_double(ck.val_loss) << '\n'
    << "seed=" << ck.seed << '\n';
  for (const Parameter& p : ck.model.params()) {
    h << "param=" << p.name << ' ' << p.value.shape()[0] << 'x' << p.value.shape()[1] << '\n';
  }
  return h.str();
}

class HeaderFields {
 public:
  explicit HeaderFields(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("checkpoint header line without '=': " + line);
      const std::string key = line.substr(0, eq);
      if (key != "param") fields_[key] = line.substr(eq + 1);
    }
  }

  const std::string& text(const std::string& key) const {
    auto it = fields_.find(key);
    if (it == fields_.end()) throw FormatError("checkpoint header is missing '" + key + "'");
    return it->second;
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string& s = text(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("checkpoint field '" + key + "' is not an integer");
    return v;
  }

  double real(const std::string& key) const {
    const std::string& s = text(key);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("checkpoint field '" + key + "' is not a number");
    return v;
  }

 private:
  std::map<std::string, std::string> fields_;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  const std::string header = build_header(ck);
  const std::vector<double> params = ck.model.flat_parameters();
  std::string out;
  out.reserve(4 + 4 + 4 + header.size() + 8 + params.size() * 8);
  out.append(kMagic);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out.append(header);
  put_le<std::uint64_t>(out, params.size());
  for (double p : params) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("not an arollout checkpoint (bad magic bytes)");
  }
  std::size_t pos = kMagic.size();
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version > kCheckpointVersion) {
    throw VersionError("checkpoint format version " + std::to_string(version) + " is newer than supported version " +
                       std::to_string(kCheckpointVersion));
  }
  if (version == 0) throw FormatError("checkpoint format version 0 is invalid");
  const auto header_len = get_le<std::uint32_t>(bytes, pos);
  if (bytes.size() - pos < header_len) throw FormatError("checkpoint is truncated");
  const HeaderFields h(bytes.substr(pos, header_len));
  pos += header_len;

  try {
    const ModelKind kind = parse_model_kind(h.text("kind"));
    ForecasterDims dims;
    dims.context = h.integer("context");
    dims.overlap = h.integer("overlap");
    dims.block = h.integer("block");
    dims.variates = h.integer("variates");
    dims.hidden = h.integer("hidden");

    const auto count = get_le<std::uint64_t>(bytes, pos);
    if (count != parameter_count(kind, dims)) {
      throw FormatError("checkpoint holds " + std::to_string(count) + " parameters, model dims require " +
                        std::to_string(parameter_count(kind, dims)));
    }
    if ((bytes.size() - pos) / 8 < count) throw FormatError("checkpoint is truncated");
    std::vector<double> flat(count);
    for (double& p : flat) p = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
    if (pos != bytes.size()) throw FormatError("checkpoint has trailing bytes");

    Forecaster model = init_forecaster(kind, dims, 0);
    model.set_flat_parameters(flat);

    RolloutConfig rollout;
    rollout.context = dims.context;
    rollout.block = dims.block;
    rollout.overlap = dims.overlap;
    rollout.steps = h.integer("steps");
    rollout.gamma = h.real("gamma");
    rollout.beta = h.real("beta");
    rollout.validate();

    Checkpoint ck{std::move(model), rollout};
    ck.objective = parse_objective(h.text("objective"));
    ck.norm_policy = h.text("norm_policy");
    if (ck.norm_policy != kNormPolicy) throw FormatError("unsupported normalization policy '" + ck.norm_policy + "'");
    ck.epoch = h.integer("epoch");
    ck.val_loss = h.real("val_loss");
    ck.seed = h.integer("seed");
    return ck;
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("corrupt checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ck);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace arollout
