#pragma once
// Working prefix codes on top of designed codebooks. Implied probabilities
// become integer codeword lengths by ceiling the ideal length, which keeps
// Kraft's inequality intact; a canonical code realizes the lengths and the
// bitstream container carries everything a decoder needs besides the
// codebook set itself.
//
// Container layouts (all integers big-endian, bits packed MSB-first):
//   codebook-set stream:  "ESC1" | version 0x01 | N:u16 | K:u16 | L:u32
//                         | ceil(log2 K) codebook-id bits | payload | pad
//   self-decodable:       "ESD1" | version 0x01 | N:u16 | L:u32
//                         | N codeword lengths as u8 (0 = absent)
//                         | payload | pad

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "prefcode/info.hpp"
#include "prefcode/types.hpp"

namespace prefcode {

/// Integer codeword lengths per symbol; 0 marks an unencodable symbol.
struct LengthTable {
  std::vector<std::uint32_t> lengths;
};

/// Ceiling of the ideal lengths -log2 q_n (with a 1e-9 relaxation so exact
/// powers of two are not bumped a bit by rounding noise). Zero entries are
/// unencodable, as are entries below 2^-64, which no practical design
/// produces. Lengths are floored at one bit.
inline LengthTable lengths_from_codebook(const Codebook& q) {
  LengthTable table;
  table.lengths.resize(q.size(), 0);
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (!(q[n] > 0.0)) continue;
    double ideal = -std::log2(q[n]);
    if (ideal > 64.0) continue;
    auto len = static_cast<std::uint32_t>(std::ceil(ideal - 1e-9));
    table.lengths[n] = std::max<std::uint32_t>(len, 1);
  }
  return table;
}

struct PrefixCode {
  // Per symbol: codeword value in the low `lengths[n]` bits; length 0 marks
  // an absent symbol.
  std::vector<std::uint64_t> codes;
  std::vector<std::uint32_t> lengths;
};

namespace detail {

inline bool kraft_integer_ok(const std::vector<std::uint32_t>& lengths) {
  unsigned __int128 sum = 0;
  const unsigned __int128 one = 1;
  for (std::uint32_t len : lengths) {
    if (len == 0) continue;
    sum += one << (64 - len);
  }
  return sum <= (one << 64);
}

}  // namespace detail

/// Canonical code: symbols ordered by (length, index) receive consecutive
/// codeword values, shifted left at every length increase.
inline PrefixCode build_prefix_code(const LengthTable& table) {
  if (!detail::kraft_integer_ok(table.lengths))
    throw KraftViolation("codeword lengths violate Kraft's inequality");
  std::vector<std::size_t> order;
  for (std::size_t n = 0; n < table.lengths.size(); ++n)
    if (table.lengths[n] > 0) order.push_back(n);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (table.lengths[a] != table.lengths[b]) return table.lengths[a] < table.lengths[b];
    return a < b;
  });
  PrefixCode code;
  code.codes.assign(table.lengths.size(), 0);
  code.lengths = table.lengths;
  std::uint64_t next = 0;
  std::uint32_t prev_len = 0;
  for (std::size_t n : order) {
    const std::uint32_t len = table.lengths[n];
    next <<= (len - prev_len);
    code.codes[n] = next;
    ++next;
    prev_len = len;
  }
  return code;
}

struct Bitstream {
  std::vector<std::uint8_t> bytes;
};

namespace detail {

class BitWriter {
 public:
  void write_bits(std::uint64_t value, std::uint32_t count) {
    for (std::uint32_t i = count; i-- > 0;) put((value >> i) & 1u);
  }
  void write_u8(std::uint8_t v) { write_bits(v, 8); }
  void write_u16(std::uint16_t v) { write_bits(v, 16); }
  void write_u32(std::uint32_t v) { write_bits(v, 32); }
  Bitstream finish() {
    if (bit_ != 0) {
      bytes_.push_back(static_cast<std::uint8_t>(cur_ << (8 - bit_)));
      cur_ = 0;
      bit_ = 0;
    }
    return Bitstream{std::move(bytes_)};
  }

 private:
  void put(std::uint32_t b) {
    cur_ = static_cast<std::uint8_t>((cur_ << 1) | b);
    if (++bit_ == 8) {
      bytes_.push_back(cur_);
      cur_ = 0;
      bit_ = 0;
    }
  }
  std::vector<std::uint8_t> bytes_;
  std::uint8_t cur_ = 0;
  std::uint32_t bit_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint32_t read_bit() {
    const std::size_t byte = pos_ >> 3;
    if (byte >= bytes_.size()) throw TruncatedStream("bitstream ended early");
    std::uint32_t b = (bytes_[byte] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    return b;
  }
  std::uint64_t read_bits(std::uint32_t count) {
    std::uint64_t v = 0;
    for (std::uint32_t i = 0; i < count; ++i) v = (v << 1) | read_bit();
    return v;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

inline std::uint32_t id_bit_count(std::size_t k) {
  std::uint32_t bits = 0;
  while ((std::size_t{1} << bits) < k) ++bits;
  return bits;
}

struct CanonicalDecoder {
  std::uint32_t max_len = 0;
  std::vector<std::uint64_t> first;        // first code value per length
  std::vector<std::uint64_t> count;        // symbols per length
  std::vector<std::size_t> offset;         // start into `symbols` per length
  std::vector<std::size_t> symbols;        // symbols in canonical order

  explicit CanonicalDecoder(const LengthTable& table) {
    std::vector<std::size_t> order;
    for (std::size_t n = 0; n < table.lengths.size(); ++n)
      if (table.lengths[n] > 0) {
        order.push_back(n);
        max_len = std::max(max_len, table.lengths[n]);
      }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (table.lengths[a] != table.lengths[b]) return table.lengths[a] < table.lengths[b];
      return a < b;
    });
    first.assign(max_len + 1, 0);
    count.assign(max_len + 1, 0);
    offset.assign(max_len + 1, 0);
    std::uint64_t next = 0;
    std::uint32_t prev_len = 0;
    for (std::size_t n : order) {
      std::uint32_t len = table.lengths[n];
      next <<= (len - prev_len);
      if (count[len] == 0) {
        first[len] = next;
        offset[len] = symbols.size();
      }
      ++count[len];
      ++next;
      prev_len = len;
      symbols.push_back(n);
    }
  }

  std::size_t decode_one(BitReader& reader) const {
    std::uint64_t code = 0;
    for (std::uint32_t len = 1; len <= max_len; ++len) {
      code = (code << 1) | reader.read_bit();
      if (count[len] != 0 && code >= first[len] && code - first[len] < count[len])
        return symbols[offset[len] + (code - first[len])];
    }
    throw InvalidCodeword("bit pattern matches no codeword");
  }
};

}  // namespace detail

/// Encodes an item with the payload-minimizing codebook of the set (ties to
/// the lowest index). The stream records which codebook was used, so the
/// decoder never has to guess.
inline Bitstream encode(const ItemSpec& item, const CodebookSet& set) {
  const std::size_t n = set.alphabet_size();
  if (item.symbols.empty()) throw std::invalid_argument("encode: empty item");
  for (std::size_t s : item.symbols)
    if (s >= n) throw std::invalid_argument("encode: symbol index out of range");

  std::size_t best_k = set.size();
  std::uint64_t best_bits = ~std::uint64_t{0};
  std::vector<LengthTable> tables;
  tables.reserve(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    tables.push_back(lengths_from_codebook(set[k]));
    std::uint64_t bits = 0;
    bool usable = true;
    for (std::size_t s : item.symbols) {
      if (tables[k].lengths[s] == 0) {
        usable = false;
        break;
      }
      bits += tables[k].lengths[s];
    }
    if (usable && bits < best_bits) {
      best_bits = bits;
      best_k = k;
    }
  }
  if (best_k == set.size()) throw Unencodable("no codebook covers this item's symbols");

  auto code = build_prefix_code(tables[best_k]);
  detail::BitWriter out;
  out.write_u8('E');
  out.write_u8('S');
  out.write_u8('C');
  out.write_u8('1');
  out.write_u8(0x01);
  out.write_u16(static_cast<std::uint16_t>(n));
  out.write_u16(static_cast<std::uint16_t>(set.size()));
  out.write_u32(static_cast<std::uint32_t>(item.symbols.size()));
  out.write_bits(best_k, detail::id_bit_count(set.size()));
  for (std::size_t s : item.symbols) out.write_bits(code.codes[s], code.lengths[s]);
  return out.finish();
}

/// Inverse of encode, given the same codebook set.
inline ItemSpec decode(const Bitstream& stream, const CodebookSet& set) {
  detail::BitReader in(stream.bytes);
  char magic[4];
  for (auto& c : magic) c = static_cast<char>(in.read_bits(8));
  if (magic[0] != 'E' || magic[1] != 'S' || magic[2] != 'C' || magic[3] != '1')
    throw BadMagic("not a codebook-set stream");
  if (in.read_bits(8) != 0x01) throw BadMagic("unsupported stream version");
  const auto n = static_cast<std::size_t>(in.read_bits(16));
  const auto k = static_cast<std::size_t>(in.read_bits(16));
  if (n != set.alphabet_size() || k != set.size())
    throw DimensionMismatch("stream was made with a different codebook set");
  const auto length = static_cast<std::size_t>(in.read_bits(32));
  const auto id = static_cast<std::size_t>(in.read_bits(detail::id_bit_count(k)));
  if (id >= k) throw InvalidCodeword("codebook id out of range");
  detail::CanonicalDecoder decoder(lengths_from_codebook(set[id]));
  ItemSpec item;
  item.symbols.reserve(length);
  for (std::size_t i = 0; i < length; ++i) item.symbols.push_back(decoder.decode_one(in));
  return item;
}

/// Bits needed by the carry-your-own-codebook baseline at real-valued
/// codeword lengths: L*H(p) plus one ideal codeword length per symbol of the
/// alphabet to describe the code itself.
inline double self_decodable_bits(const Spv& p, std::size_t length) {
  if (length == 0) throw std::invalid_argument("self_decodable_bits: length must be positive");
  double overhead = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (!(p[n] > 0.0))
      throw ZeroProbabilitySymbol("self-decodable baseline needs full support");
    overhead += -std::log2(p[n]);
  }
  return static_cast<double>(length) * entropy(p) + overhead;
}

/// Self-contained container: the integer length table rides along with the
/// payload, so decoding needs no shared codebook state.
inline Bitstream encode_self_decodable(const ItemSpec& item, const Spv& p) {
  const std::size_t n = p.size();
  if (n > 255) throw std::invalid_argument("self-decodable container caps N at 255");
  for (std::size_t s : item.symbols)
    if (s >= n) throw std::invalid_argument("encode: symbol index out of range");
  auto table = lengths_from_codebook(Codebook(p.probs()));
  for (std::size_t s : item.symbols)
    if (table.lengths[s] == 0) throw Unencodable("item uses a zero-probability symbol");
  auto code = build_prefix_code(table);
  detail::BitWriter out;
  out.write_u8('E');
  out.write_u8('S');
  out.write_u8('D');
  out.write_u8('1');
  out.write_u8(0x01);
  out.write_u16(static_cast<std::uint16_t>(n));
  out.write_u32(static_cast<std::uint32_t>(item.symbols.size()));
  for (std::size_t i = 0; i < n; ++i)
    out.write_u8(static_cast<std::uint8_t>(table.lengths[i]));
  for (std::size_t s : item.symbols) out.write_bits(code.codes[s], code.lengths[s]);
  return out.finish();
}

inline ItemSpec decode_self_decodable(const Bitstream& stream) {
  detail::BitReader in(stream.bytes);
  char magic[4];
  for (auto& c : magic) c = static_cast<char>(in.read_bits(8));
  if (magic[0] != 'E' || magic[1] != 'S' || magic[2] != 'D' || magic[3] != '1')
    throw BadMagic("not a self-decodable stream");
  if (in.read_bits(8) != 0x01) throw BadMagic("unsupported stream version");
  const auto n = static_cast<std::size_t>(in.read_bits(16));
  const auto length = static_cast<std::size_t>(in.read_bits(32));
  LengthTable table;
  table.lengths.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    table.lengths[i] = static_cast<std::uint32_t>(in.read_bits(8));
  detail::CanonicalDecoder decoder(table);
  ItemSpec item;
  item.symbols.reserve(length);
  for (std::size_t i = 0; i < length; ++i) item.symbols.push_back(decoder.decode_one(in));
  return item;
}

}  // namespace prefcode
