#include "mprl/nn/checkpoint.hpp"

#include <fstream>

#include "mprl/binary_io.hpp"
#include "mprl/error.hpp"

namespace mprl::nn {

namespace {

constexpr std::string_view kMagic = "MPRLCKP1";
constexpr std::uint64_t kVersion = 1;

void write_adam(io::BinaryWriter& w, const AdamState& s) {
  w.vector_with_size(s.m);
  w.vector_with_size(s.v);
  w.u64(static_cast<std::uint64_t>(s.step));
}

AdamState read_adam(io::BinaryReader& r) {
  AdamState s;
  s.m = r.vector_with_size();
  s.v = r.vector_with_size();
  s.step = static_cast<std::int64_t>(r.u64());
  return s;
}

}  // namespace

std::string manifest_path(const std::string& checkpoint_path) {
  return checkpoint_path + ".manifest";
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    io::BinaryWriter w(out);
    w.bytes(kMagic);
    w.u64(kVersion);
    w.string(c.policy_spec.to_string());
    w.string(c.value_spec.to_string());
    w.vector_with_size(c.policy_params);
    w.vector_with_size(c.value_params);
    write_adam(w, c.policy_opt);
    write_adam(w, c.value_opt);
    w.u64(c.metadata.size());
    for (const auto& [k, v] : c.metadata) {
      w.string(k);
      w.string(v);
    }
    const std::uint64_t sum = w.checksum();
    w.u64(sum);
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  std::ofstream manifest(manifest_path(path));
  manifest << "format = MPRLCKP1\n"
           << "policy_spec = " << c.policy_spec.to_string() << '\n'
           << "value_spec = " << c.value_spec.to_string() << '\n'
           << "policy_params = " << c.policy_params.size() << '\n'
           << "value_params = " << c.value_params.size() << '\n';
  for (const auto& [k, v] : c.metadata) {
    // multi-line values (the embedded config) are summarized
    if (v.find('\n') == std::string::npos) manifest << k << " = " << v << '\n';
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  io::BinaryReader r(in, "checkpoint " + path);
  if (r.bytes(kMagic.size()) != kMagic) r.fail("bad magic (not a checkpoint)");
  if (r.u64() != kVersion) r.fail("unsupported version");

  Checkpoint c;
  c.policy_spec = MlpSpec::parse(r.string(4096));
  c.value_spec = MlpSpec::parse(r.string(4096));
  c.policy_params = r.vector_with_size();
  c.value_params = r.vector_with_size();
  c.policy_opt = read_adam(r);
  c.value_opt = read_adam(r);
  const auto entries = r.u64();
  if (entries > 100000) r.fail("implausible metadata size");
  for (std::uint64_t i = 0; i < entries; ++i) {
    std::string k = r.string();
    c.metadata[k] = r.string();
  }
  const std::uint64_t expected = r.checksum();
  if (r.u64() != expected) r.fail("checksum mismatch");
  if (in.peek() != std::char_traits<char>::eof()) r.fail("trailing bytes");

  const auto policy_size = c.policy_spec.num_params() + c.policy_spec.output_dim;
  if (c.policy_params.size() != policy_size) r.fail("policy parameter count does not match spec");
  if (c.value_params.size() != c.value_spec.num_params())
    r.fail("value parameter count does not match spec");
  return c;
}

}  // namespace mprl::nn
