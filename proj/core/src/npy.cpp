#include "netexplain/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "netexplain/errors.hpp"

namespace netexplain {
namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kPreambleFixed = 10;  // magic + version + header len
constexpr std::size_t kAlignment = 64;

template <typename T>
T load_le(const std::byte* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(b[i], b[sizeof(T) - 1 - i]);
    }
  }
  return value;
}

template <typename T>
std::byte* store_le(std::byte* out, T value) {
  std::memcpy(out, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(out, out + sizeof(T));
  }
  return out + sizeof(T);
}

struct Header {
  DType dtype = DType::kFloat64;
  std::vector<std::size_t> shape;
};

// Minimal reader for the Python dict literal NumPy writes, e.g.
// {'descr': '<f4', 'fortran_order': False, 'shape': (13, 13, 256), }
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  Header parse() {
    std::optional<std::string> descr;
    std::optional<bool> fortran;
    std::optional<std::vector<std::size_t>> shape;

    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      std::string key = parse_string();
      expect(':');
      if (key == "descr") {
        skip_ws();
        if (peek() != '\'' && peek() != '"') {
          throw UnsupportedDtype("structured dtypes are not supported");
        }
        descr = parse_string();
      } else if (key == "fortran_order") {
        fortran = parse_bool();
      } else if (key == "shape") {
        shape = parse_shape();
      } else {
        throw FormatError(fmt::format("unexpected header key '{}'", key));
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        throw FormatError("expected ',' or '}' in header");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) throw FormatError("trailing bytes after header");
    if (!descr || !fortran || !shape) {
      throw FormatError("header must define descr, fortran_order and shape");
    }
    if (*fortran) throw UnsupportedLayout("fortran_order arrays not supported");

    Header h;
    if (*descr == "<f4") {
      h.dtype = DType::kFloat32;
    } else if (*descr == "<f8") {
      h.dtype = DType::kFloat64;
    } else {
      throw UnsupportedDtype(
          fmt::format("dtype '{}' not supported (need <f4 or <f8)", *descr));
    }
    h.shape = std::move(*shape);
    return h;
  }

 private:
  char peek() const {
    if (pos_ >= text_.size()) throw FormatError("unexpected end of header");
    return text_[pos_];
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      throw FormatError(fmt::format("expected '{}' in header at offset {}", c,
                                    pos_));
    }
    ++pos_;
  }

  std::string parse_string() {
    skip_ws();
    const char quote = peek();
    if (quote != '\'' && quote != '"') throw FormatError("expected string");
    ++pos_;
    const std::size_t end = text_.find(quote, pos_);
    if (end == std::string_view::npos) throw FormatError("unterminated string");
    std::string s(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return s;
  }

  bool parse_bool() {
    skip_ws();
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    throw FormatError("expected True or False");
  }

  std::vector<std::size_t> parse_shape() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        throw FormatError("shape entries must be non-negative integers");
      }
      std::size_t value = 0;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        const std::size_t digit = static_cast<std::size_t>(text_[pos_] - '0');
        if (value > (std::numeric_limits<std::size_t>::max() - digit) / 10) {
          throw FormatError("shape dimension overflows");
        }
        value = value * 10 + digit;
        ++pos_;
      }
      if (value == 0) throw FormatError("zero-length dimensions not supported");
      dims.push_back(value);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ')') {
        throw FormatError("expected ',' or ')' in shape");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string shape_literal(const std::vector<std::size_t>& shape) {
  if (shape.empty()) return "()";
  if (shape.size() == 1) return fmt::format("({},)", shape[0]);
  return fmt::format("({})", fmt::join(shape, ", "));
}

}  // namespace

Tensor parse_npy(std::span<const std::byte> bytes) {
  if (bytes.size() < kPreambleFixed ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("missing NPY magic");
  }
  const auto major = std::to_integer<unsigned>(bytes[6]);
  const auto minor = std::to_integer<unsigned>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw FormatError(
        fmt::format("NPY version {}.{} not supported (need 1.0)", major, minor));
  }
  const std::size_t header_len = load_le<std::uint16_t>(bytes.data() + 8);
  if (bytes.size() < kPreambleFixed + header_len) {
    throw TruncatedFile("file ends inside the NPY header");
  }
  const std::string_view header_text(
      reinterpret_cast<const char*>(bytes.data() + kPreambleFixed), header_len);
  if (header_text.empty() || header_text.back() != '\n') {
    throw FormatError("NPY header must end with a newline");
  }
  Header header = HeaderParser(header_text).parse();

  std::size_t count = 1;
  for (std::size_t d : header.shape) {
    if (count > std::numeric_limits<std::size_t>::max() / 8 / d) {
      throw FormatError("shape is too large");
    }
    count *= d;
  }
  const std::size_t item = header.dtype == DType::kFloat32 ? 4 : 8;
  const auto payload = bytes.subspan(kPreambleFixed + header_len);
  if (payload.size() != count * item) {
    throw TruncatedFile(fmt::format("payload is {} bytes, shape needs {}",
                                    payload.size(), count * item));
  }

  std::vector<double> data(count);
  const std::byte* p = payload.data();
  if (header.dtype == DType::kFloat32) {
    for (std::size_t i = 0; i < count; ++i) data[i] = load_le<float>(p + i * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i) data[i] = load_le<double>(p + i * 8);
  }
  return Tensor(std::move(header.shape), std::move(data));
}

std::vector<std::byte> write_npy(const Tensor& t, DType dtype) {
  const bool f4 = dtype == DType::kFloat32;
  if (f4) {
    for (double v : t.data()) {
      if (std::fabs(v) > static_cast<double>(FLT_MAX)) {
        throw RangeError(fmt::format("{} does not fit in float32", v));
      }
    }
  }

  std::string header =
      fmt::format("{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
                  f4 ? "<f4" : "<f8", shape_literal(t.shape()));
  const std::size_t unpadded = kPreambleFixed + header.size() + 1;
  header.append((kAlignment - unpadded % kAlignment) % kAlignment, ' ');
  header.push_back('\n');
  if (header.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw FormatError("shape too long for an NPY v1.0 header");
  }

  std::vector<std::byte> out(kPreambleFixed + header.size() +
                             t.size() * (f4 ? 4 : 8));
  std::byte* p = out.data();
  for (char c : kMagic) *p++ = static_cast<std::byte>(c);
  *p++ = std::byte{1};
  *p++ = std::byte{0};
  p = store_le<std::uint16_t>(p, static_cast<std::uint16_t>(header.size()));
  std::memcpy(p, header.data(), header.size());
  p += header.size();
  if (f4) {
    for (double v : t.data()) p = store_le<float>(p, static_cast<float>(v));
  } else {
    for (double v : t.data()) p = store_le<double>(p, v);
  }
  return out;
}

Tensor read_npy_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return parse_npy(std::as_bytes(std::span<const char>(raw)));
}

void write_npy_file(const std::filesystem::path& path, const Tensor& t,
                    DType dtype) {
  const auto bytes = write_npy(t, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot create '{}'", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace netexplain
