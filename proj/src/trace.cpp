#include "edag/trace.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <unordered_map>

namespace edag {

MalformedLine::MalformedLine(std::uint64_t line_no, const std::string& why)
    : Error("line " + std::to_string(line_no) + ": malformed trace line: " + why), line_no_(line_no) {}

void TraceRecord::push_operand(const Operand& op) {
  if (operand_count >= kMaxOperands) throw Error("too many operands");
  operand_storage[operand_count++] = op;
}

bool operator==(const TraceRecord& a, const TraceRecord& b) {
  return a.line_no == b.line_no && a.mnemonic == b.mnemonic && a.data_addr == b.data_addr &&
         std::ranges::equal(a.operands(), b.operands());
}

namespace {

constexpr bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool has_hex_prefix(std::string_view s) {
  return s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
}

std::optional<std::uint64_t> parse_u64(std::string_view s, int base) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Signed decimal or 0x-hex. Hex literals above INT64_MAX keep their bit
// pattern (`li a5,0xffffffffffffffff`).
std::optional<std::int64_t> parse_int(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  const bool hex = has_hex_prefix(s);
  auto mag = hex ? parse_u64(s.substr(2), 16) : parse_u64(s, 10);
  if (!mag) return std::nullopt;
  constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  if (neg) {
    if (*mag > kMax + 1) return std::nullopt;
    return static_cast<std::int64_t>(~*mag + 1);
  }
  if (*mag > kMax && !hex) return std::nullopt;
  return static_cast<std::int64_t>(*mag);
}

// Non-register symbols that appear in disassembly: CSR names, float
// rounding modes and fence ordering sets. They carry no data dependency and
// parse as immediates.
std::optional<std::int64_t> symbolic_immediate(std::string_view s) {
  static const std::unordered_map<std::string_view, std::int64_t> table = {
      {"fflags", 0x001}, {"frm", 0x002},     {"fcsr", 0x003},   {"cycle", 0xC00},
      {"time", 0xC01},   {"instret", 0xC02}, {"cycleh", 0xC80}, {"timeh", 0xC81},
      {"instreth", 0xC82},
      {"rne", 0}, {"rtz", 1}, {"rdn", 2}, {"rup", 3}, {"rmm", 4}, {"dyn", 7},
      {"w", 1}, {"r", 2}, {"rw", 3}, {"o", 4}, {"ow", 5}, {"or", 6}, {"orw", 7},
      {"i", 8}, {"iw", 9}, {"ir", 10}, {"irw", 11}, {"io", 12}, {"iow", 13}, {"ior", 14},
      {"iorw", 15},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<Operand> parse_operand(std::string_view tok) {
  if (auto open = tok.find('('); open != std::string_view::npos) {
    if (tok.back() != ')') return std::nullopt;
    auto disp_text = trim(tok.substr(0, open));
    auto base_text = trim(tok.substr(open + 1, tok.size() - open - 2));
    auto base = parse_reg(base_text);
    if (!base) return std::nullopt;
    std::int64_t disp = 0;
    if (!disp_text.empty()) {
      auto d = parse_int(disp_text);
      if (!d) return std::nullopt;
      disp = *d;
    }
    return Operand::mem(disp, *base);
  }
  if (auto r = parse_reg(tok)) return Operand::reg_op(*r);
  if (auto v = parse_int(tok)) return Operand::imm(*v);
  if (auto v = symbolic_immediate(tok)) return Operand::imm(*v);
  return std::nullopt;
}

}  // namespace

void parse_trace_line_into(std::string_view line, std::uint64_t line_no, TraceRecord& out) {
  out.line_no = line_no;
  out.operand_count = 0;
  out.data_addr.reset();
  out.mnemonic.clear();

  std::string_view insn = line;
  if (auto semi = line.find(';'); semi != std::string_view::npos) {
    insn = line.substr(0, semi);
    auto addr = trim(line.substr(semi + 1));
    if (!has_hex_prefix(addr)) throw MalformedLine(line_no, "address suffix is not 0x-hex");
    auto v = parse_u64(addr.substr(2), 16);
    if (!v) throw MalformedLine(line_no, "bad address '" + std::string(addr) + "'");
    out.data_addr = *v;
  }

  insn = trim(insn);
  auto split = std::find_if(insn.begin(), insn.end(), is_space);
  auto mnem = insn.substr(0, static_cast<std::size_t>(split - insn.begin()));
  if (mnem.empty()) throw MalformedLine(line_no, "empty mnemonic");
  out.mnemonic.assign(mnem);
  for (auto& c : out.mnemonic) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  auto rest = trim(insn.substr(mnem.size()));
  if (rest.empty()) return;
  while (true) {
    auto comma = rest.find(',');
    auto tok = trim(rest.substr(0, comma));
    if (tok.empty()) throw MalformedLine(line_no, "empty operand");
    auto op = parse_operand(tok);
    if (!op) throw MalformedLine(line_no, "unparseable operand '" + std::string(tok) + "'");
    if (out.operand_count >= kMaxOperands) throw MalformedLine(line_no, "too many operands");
    out.push_operand(*op);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
}

TraceRecord parse_trace_line(std::string_view line, std::uint64_t line_no) {
  TraceRecord rec;
  parse_trace_line_into(line, line_no, rec);
  return rec;
}

std::string render_trace_line(const TraceRecord& rec) {
  std::string out = rec.mnemonic;
  bool first = true;
  for (const auto& op : rec.operands()) {
    out += first ? ' ' : ',';
    first = false;
    switch (op.kind) {
      case OperandKind::Register:
        out += reg_name(op.reg);
        break;
      case OperandKind::Immediate:
        out += std::to_string(op.value);
        break;
      case OperandKind::MemRef:
        out += std::to_string(op.value);
        out += '(';
        out += reg_name(op.reg);
        out += ')';
        break;
    }
  }
  if (rec.data_addr) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *rec.data_addr, 16);
    out += ";0x";
    out.append(buf, p);
  }
  return out;
}

// ---------------------------------------------------------------------------

class TraceReader::LineSource {
 public:
  virtual ~LineSource() = default;
  virtual bool getline(std::string& line) = 0;
};

namespace {

class StreamSource final : public TraceReader::LineSource {
 public:
  explicit StreamSource(std::istream& in) : in_(&in) {}
  explicit StreamSource(const std::filesystem::path& path)
      : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)), in_(owned_.get()) {
    if (!*owned_) throw TraceReadError("cannot open trace '" + path.string() + "'");
  }

  bool getline(std::string& line) override {
    if (std::getline(*in_, line)) return true;
    if (in_->bad()) throw TraceReadError("I/O error while reading trace");
    return false;
  }

 private:
  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_;
};

class GzSource final : public TraceReader::LineSource {
 public:
  explicit GzSource(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw TraceReadError("cannot open trace '" + path.string() + "'");
    gzbuffer(file_, 1 << 17);
  }
  ~GzSource() override { gzclose(file_); }
  GzSource(const GzSource&) = delete;
  GzSource& operator=(const GzSource&) = delete;

  bool getline(std::string& line) override {
    line.clear();
    char buf[4096];
    while (true) {
      if (gzgets(file_, buf, sizeof buf) == nullptr) {
        int err = 0;
        const char* msg = gzerror(file_, &err);
        if (err != Z_OK && err != Z_STREAM_END) throw TraceReadError(std::string("gzip error: ") + msg);
        return !line.empty();
      }
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
  }

 private:
  gzFile file_;
};

}  // namespace

TraceReader::TraceReader(const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    source_ = std::make_unique<GzSource>(path);
  } else {
    source_ = std::make_unique<StreamSource>(path);
  }
}

TraceReader::TraceReader(std::istream& in) : source_(std::make_unique<StreamSource>(in)) {}

TraceReader::~TraceReader() = default;
TraceReader::TraceReader(TraceReader&&) noexcept = default;
TraceReader& TraceReader::operator=(TraceReader&&) noexcept = default;

bool TraceReader::next(TraceRecord& out) {
  while (source_->getline(line_)) {
    ++line_no_;
    std::string_view view = line_;
    if (trim(view).empty()) continue;
    parse_trace_line_into(view, line_no_, out);
    return true;
  }
  return false;
}

}  // namespace edag
