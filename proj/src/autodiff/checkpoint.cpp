#include "mojitalk/autodiff/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "mojitalk/util/io.hpp"

namespace mojitalk::ad {

namespace {

constexpr std::string_view kMagic = "MOJITALK-CHECKPOINT";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string line() {
    const auto end = bytes_.find('\n', pos_);
    if (end == std::string_view::npos) throw InputError("checkpoint: truncated header");
    std::string out(bytes_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string raw(std::size_t n) {
    need(n);
    std::string out(bytes_.substr(pos_, n));
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw InputError("checkpoint: truncated payload");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string after_prefix(const std::string& line, std::string_view prefix) {
  if (line.rfind(prefix, 0) != 0) throw InputError("checkpoint: expected '" + std::string(prefix) + "'");
  return line.substr(prefix.size());
}

void check_text(const std::string& s, bool allow_equals) {
  if (s.find('\n') != std::string::npos || (!allow_equals && s.find('=') != std::string::npos))
    throw std::invalid_argument("checkpoint: metadata text contains a reserved character: " + s);
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  check_text(checkpoint.kind, false);
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kCheckpointVersion) + "\n";
  out += "kind=" + checkpoint.kind + "\n";
  out += "meta_count=" + std::to_string(checkpoint.metadata.size()) + "\n";
  for (const auto& [key, value] : checkpoint.metadata) {
    check_text(key, false);
    check_text(value, true);
    out += key + "=" + value + "\n";
  }
  out += "param_count=" + std::to_string(checkpoint.params.size()) + "\n";
  out += "BINARY\n";
  for (const Parameter& p : checkpoint.params) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    put_u32(out, static_cast<std::uint32_t>(p.shape.size()));
    for (std::size_t extent : p.shape) put_u64(out, extent);
    for (double v : p.value) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  const std::string magic = in.line();
  const std::string expected = std::string(kMagic) + " " + std::to_string(kCheckpointVersion);
  if (magic != expected) throw InputError("checkpoint: unsupported header '" + magic + "'");
  Checkpoint ckpt;
  ckpt.kind = after_prefix(in.line(), "kind=");
  const std::size_t meta_count = std::stoull(after_prefix(in.line(), "meta_count="));
  for (std::size_t i = 0; i < meta_count; ++i) {
    const std::string line = in.line();
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("checkpoint: malformed metadata line");
    ckpt.metadata.emplace(line.substr(0, eq), line.substr(eq + 1));
  }
  const std::size_t param_count = std::stoull(after_prefix(in.line(), "param_count="));
  if (in.line() != "BINARY") throw InputError("checkpoint: missing BINARY marker");
  for (std::size_t i = 0; i < param_count; ++i) {
    std::string name = in.raw(in.u32());
    const std::uint32_t rank = in.u32();
    Shape shape(rank);
    for (auto& extent : shape) extent = in.u64();
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = std::bit_cast<double>(in.u64());
    ckpt.params.add(std::move(name), std::move(shape), std::move(values));
  }
  if (!in.done()) throw InputError("checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return deserialize_checkpoint(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("checkpoint: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw InputError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace mojitalk::ad
