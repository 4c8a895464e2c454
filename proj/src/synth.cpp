#include "edag/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <numeric>
#include <random>
#include <unordered_map>

namespace edag {

std::string_view to_string(SynthPattern p) {
  switch (p) {
    case SynthPattern::Chain: return "chain";
    case SynthPattern::Fanout: return "fanout";
    case SynthPattern::Sum: return "sum";
    case SynthPattern::PtrChase: return "ptr-chase";
    case SynthPattern::RandomDag: return "random-dag";
  }
  return "sum";
}

std::optional<SynthPattern> parse_pattern(std::string_view name) {
  for (auto p : {SynthPattern::Chain, SynthPattern::Fanout, SynthPattern::Sum, SynthPattern::PtrChase,
                 SynthPattern::RandomDag}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

void SynthSpec::validate() const {
  if (n < 1) throw InvalidSpec("n must be at least 1");
  if (stride < 1) throw InvalidSpec("stride must be at least 1");
  if (n > UINT32_MAX / 8) throw InvalidSpec("n is too large");
}

namespace {

class Emitter {
 public:
  void line(std::string_view insn) {
    text_ += insn;
    text_ += '\n';
    ++count_;
  }
  void line(std::string_view insn, std::uint64_t addr) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, addr, 16);
    text_ += insn;
    text_ += ";0x";
    text_.append(buf, p);
    text_ += '\n';
    ++count_;
  }
  std::uint64_t count() const { return count_; }
  std::string take() { return std::move(text_); }

 private:
  std::string text_;
  std::uint64_t count_ = 0;
};

std::string str(std::int64_t v) { return std::to_string(v); }

SynthTrace sum(const SynthSpec& s) {
  Emitter e;
  e.line("add a3,a0,a1");
  e.line("mv a0,zero");
  for (std::uint64_t i = 0; i < s.n; ++i) {
    e.line("lw a4,0(a5)", s.base_addr + i * s.stride);
    e.line("addi a5,a5," + str(static_cast<std::int64_t>(s.stride)));
    e.line("addw a0,a0,a4");
    e.line("bne a3,a5,-6");
  }
  SynthTrace t{.text = {}, .truth = {.W = s.n, .D = 1, .vertices = e.count(), .edges = {}}};
  t.text = e.take();
  return t;
}

SynthTrace ptr_chase(const SynthSpec& s, std::mt19937_64& rng) {
  std::vector<std::uint64_t> slot(s.n);
  std::iota(slot.begin(), slot.end(), 0);
  for (std::uint64_t i = s.n; i > 1; --i) std::swap(slot[i - 1], slot[rng() % i]);
  Emitter e;
  e.line("mv a5,a0");
  for (std::uint64_t i = 0; i < s.n; ++i) e.line("ld a5,0(a5)", s.base_addr + slot[i] * s.stride);
  SynthTrace t{.text = {}, .truth = {.W = s.n, .D = s.n, .vertices = e.count(), .edges = {}}};
  t.text = e.take();
  return t;
}

SynthTrace fanout(const SynthSpec& s) {
  static constexpr std::array<std::string_view, 7> kDest = {"t0", "t1", "t2", "t3", "t4", "t5", "t6"};
  Emitter e;
  for (std::uint64_t i = 0; i < s.n; ++i) {
    const auto disp = static_cast<std::int64_t>(i * s.stride);
    e.line("ld " + std::string(kDest[i % kDest.size()]) + "," + str(disp) + "(a0)", s.base_addr + i * s.stride);
  }
  SynthTrace t{.text = {}, .truth = {.W = s.n, .D = 1, .vertices = e.count(), .edges = {}}};
  t.text = e.take();
  return t;
}

SynthTrace chain(const SynthSpec& s) {
  Emitter e;
  const auto stride = static_cast<std::int64_t>(s.stride);
  for (std::uint64_t i = 0; i < s.n; ++i) {
    const std::uint64_t slot = s.base_addr + i * s.stride;
    e.line("lw a4,0(a0)", slot);
    e.line("addiw a4,a4,1");
    e.line("sw a4," + str(stride) + "(a0)", slot + s.stride);
    e.line("addi a0,a0," + str(stride));
  }
  SynthTrace t{.text = {}, .truth = {.W = 2 * s.n, .D = 2 * s.n, .vertices = e.count(), .edges = {}}};
  t.text = e.take();
  return t;
}

SynthTrace random_dag(const SynthSpec& s, std::mt19937_64& rng) {
  static constexpr std::array<std::string_view, 12> kRegs = {"a0", "a1", "a2", "a3", "a4", "a5",
                                                            "a6", "a7", "t0", "t1", "t2", "t3"};
  static constexpr std::array<std::string_view, 4> kLoads = {"lb", "lh", "lw", "ld"};
  static constexpr std::array<std::string_view, 4> kStores = {"sb", "sh", "sw", "sd"};
  constexpr std::uint32_t kNone = UINT32_MAX;
  constexpr std::uint64_t kWindow = 64;

  std::array<std::uint32_t, kRegs.size()> reg_writer;
  reg_writer.fill(kNone);
  std::unordered_map<std::uint64_t, std::uint32_t> byte_writer;
  std::vector<std::vector<std::uint32_t>> preds(s.n);
  std::vector<bool> is_mem(s.n, false);

  auto pick = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };
  Emitter e;
  for (std::uint32_t v = 0; v < s.n; ++v) {
    auto& p = preds[v];
    auto use_reg = [&](std::size_t r) {
      if (reg_writer[r] != kNone) p.push_back(reg_writer[r]);
      return std::string(kRegs[r]);
    };
    const auto roll = rng() % 100;
    if (roll < 60) {
      const bool load = roll < 35;
      const std::size_t width = pick(4);
      const std::uint64_t size = 1ull << width;
      const std::uint64_t off = rng() % (kWindow - size + 1);
      const std::uint64_t addr = s.base_addr + off;
      const std::size_t base = pick(kRegs.size());
      is_mem[v] = true;
      if (load) {
        const std::size_t rd = pick(kRegs.size());
        const std::string base_name = use_reg(base);
        for (std::uint64_t a = addr; a < addr + size; ++a) {
          if (auto it = byte_writer.find(a); it != byte_writer.end()) p.push_back(it->second);
        }
        e.line(std::string(kLoads[width]) + " " + std::string(kRegs[rd]) + ",0(" + base_name + ")", addr);
        reg_writer[rd] = v;
      } else {
        const std::size_t src = pick(kRegs.size());
        const std::string src_name = use_reg(src);
        const std::string base_name = use_reg(base);
        e.line(std::string(kStores[width]) + " " + src_name + ",0(" + base_name + ")", addr);
        for (std::uint64_t a = addr; a < addr + size; ++a) byte_writer[a] = v;
      }
    } else {
      const std::size_t rd = pick(kRegs.size());
      const std::size_t rs1 = pick(kRegs.size());
      if (rng() % 2 == 0) {
        const std::size_t rs2 = pick(kRegs.size());
        const std::string a = use_reg(rs1);
        const std::string b = use_reg(rs2);
        e.line("add " + std::string(kRegs[rd]) + "," + a + "," + b);
      } else {
        e.line("addi " + std::string(kRegs[rd]) + "," + use_reg(rs1) + "," + str(static_cast<std::int64_t>(rng() % 64)));
      }
      reg_writer[rd] = v;
    }
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }

  SynthTrace t;
  std::vector<std::uint64_t> depth(s.n, 0);  // memory vertices on the deepest path ending at v
  for (std::uint32_t v = 0; v < s.n; ++v) {
    std::uint64_t d = 0;
    for (auto u : preds[v]) {
      d = std::max(d, depth[u]);
      t.truth.edges.emplace_back(u, v);
    }
    depth[v] = d + (is_mem[v] ? 1 : 0);
    t.truth.D = std::max(t.truth.D, depth[v]);
    if (is_mem[v]) ++t.truth.W;
  }
  t.truth.vertices = e.count();
  t.text = e.take();
  return t;
}

}  // namespace

SynthTrace generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  switch (spec.pattern) {
    case SynthPattern::Sum: return sum(spec);
    case SynthPattern::PtrChase: return ptr_chase(spec, rng);
    case SynthPattern::Fanout: return fanout(spec);
    case SynthPattern::Chain: return chain(spec);
    case SynthPattern::RandomDag: return random_dag(spec, rng);
  }
  throw InvalidSpec("unknown pattern");
}

}  // namespace edag
