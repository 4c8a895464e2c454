#include "edag/isa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace edag {

std::string_view to_string(InsnKind k) {
  switch (k) {
    case InsnKind::Load: return "load";
    case InsnKind::Store: return "store";
    case InsnKind::Branch: return "branch";
    case InsnKind::Jump: return "jump";
    case InsnKind::Arith: return "arith";
    case InsnKind::Move: return "move";
    case InsnKind::Other: return "other";
  }
  return "other";
}

void RegSet::insert(Reg r) {
  if (r.is_zero() || contains(r)) return;
  if (count_ >= regs_.size()) throw Error("register set overflow");
  regs_[count_++] = r;
}

bool RegSet::contains(Reg r) const {
  return std::find(regs_.begin(), regs_.begin() + count_, r) != regs_.begin() + count_;
}

namespace {

void append_range(std::vector<ValueKey>& keys, const MemAccess& m) {
  for (std::uint64_t a = m.address; a < m.address + m.size; ++a) keys.emplace_back(MemByte{a});
}

}  // namespace

std::vector<ValueKey> InstructionEffect::read_keys() const {
  std::vector<ValueKey> keys(reads.items().begin(), reads.items().end());
  if (mem && reads_memory) append_range(keys, *mem);
  return keys;
}

std::vector<ValueKey> InstructionEffect::write_keys() const {
  std::vector<ValueKey> keys(writes.items().begin(), writes.items().end());
  if (mem && writes_memory) append_range(keys, *mem);
  return keys;
}

UnknownMnemonic::UnknownMnemonic(const TraceRecord& rec)
    : Error("line " + std::to_string(rec.line_no) + ": unknown mnemonic '" + rec.mnemonic + "'"),
      line_no_(rec.line_no) {}

NotAMemoryOp::NotAMemoryOp(std::string_view mnemonic)
    : Error("'" + std::string(mnemonic) + "' is not a memory operation") {}

namespace {

enum class Form : std::uint8_t {
  WriteFirst,  // rd, src...   (first register written, the rest read)
  Load,        // rd, off(rs1)
  Store,       // rs2, off(rs1)
  Branch,      // every register read
  Jal,         // [rd,] off    (rd defaults to ra)
  J,           // off
  Jalr,        // rs | rd, rs, off | rd, off(rs)
  Jr,          // rs
  Ret,
  Call,        // writes ra
  Tail,
  CsrWrite,    // fscsr/fsrm/fsflags: [rd,] rs
  LoadReserved,
  StoreConditional,
  Amo,
  NoEffect,
};

struct Desc {
  InsnKind kind;
  Form form;
  std::uint8_t size = 0;
};

using Table = std::unordered_map<std::string_view, Desc>;

const Table& table() {
  static const Table t = [] {
    Table m;
    // Composed keys must outlive the table.
    static std::deque<std::string> interned;
    auto add = [&m](std::initializer_list<std::string_view> names, InsnKind k, Form f, std::uint8_t size = 0) {
      for (auto n : names) m.emplace(n, Desc{k, f, size});
    };
    using K = InsnKind;
    using F = Form;

    add({"lb", "lbu"}, K::Load, F::Load, 1);
    add({"lh", "lhu"}, K::Load, F::Load, 2);
    add({"lw", "lwu", "flw"}, K::Load, F::Load, 4);
    add({"ld", "fld"}, K::Load, F::Load, 8);
    add({"sb"}, K::Store, F::Store, 1);
    add({"sh"}, K::Store, F::Store, 2);
    add({"sw", "fsw"}, K::Store, F::Store, 4);
    add({"sd", "fsd"}, K::Store, F::Store, 8);

    add({"lr.w"}, K::Load, F::LoadReserved, 4);
    add({"lr.d"}, K::Load, F::LoadReserved, 8);
    add({"sc.w"}, K::Store, F::StoreConditional, 4);
    add({"sc.d"}, K::Store, F::StoreConditional, 8);
    for (std::string_view op : {"amoswap", "amoadd", "amoxor", "amoand", "amoor", "amomin", "amomax",
                                "amominu", "amomaxu"}) {
      interned.push_back(std::string(op) + ".w");
      m.emplace(interned.back(), Desc{K::Load, F::Amo, 4});
      interned.push_back(std::string(op) + ".d");
      m.emplace(interned.back(), Desc{K::Load, F::Amo, 8});
    }

    add({"beq", "bne", "blt", "bge", "bltu", "bgeu", "bgt", "ble", "bgtu", "bleu", "beqz", "bnez",
         "blez", "bgez", "bltz", "bgtz"},
        K::Branch, F::Branch);
    add({"jal"}, K::Jump, F::Jal);
    add({"j"}, K::Jump, F::J);
    add({"jalr"}, K::Jump, F::Jalr);
    add({"jr"}, K::Jump, F::Jr);
    add({"ret"}, K::Jump, F::Ret);
    add({"call"}, K::Jump, F::Call);
    add({"tail"}, K::Jump, F::Tail);

    add({"add",   "sub",   "sll",   "slt",   "sltu",  "xor",   "srl",   "sra",   "or",    "and",
         "addw",  "subw",  "sllw",  "srlw",  "sraw",  "addi",  "slti",  "sltiu", "xori",  "ori",
         "andi",  "slli",  "srli",  "srai",  "addiw", "slliw", "srliw", "sraiw", "auipc", "not",
         "neg",   "negw",  "sext.w", "seqz", "snez",  "sltz",  "sgtz",  "sext.b", "sext.h",
         "zext.b", "zext.h", "zext.w",
         "mul",   "mulh",  "mulhsu", "mulhu", "div",  "divu",  "rem",   "remu",  "mulw",  "divw",
         "divuw", "remw",  "remuw"},
        K::Arith, F::WriteFirst);
    for (std::string_view p : {".s", ".d"}) {
      for (std::string_view op : {"fadd", "fsub", "fmul", "fdiv", "fsqrt", "fmin", "fmax", "fmadd", "fmsub",
                                  "fnmadd", "fnmsub", "fsgnj", "fsgnjn", "fsgnjx", "feq", "flt", "fle",
                                  "fclass", "fabs", "fneg", "fcvt.w", "fcvt.wu", "fcvt.l", "fcvt.lu"}) {
        interned.push_back(std::string(op) + std::string(p));
        m.emplace(interned.back(), Desc{K::Arith, F::WriteFirst});
      }
      for (std::string_view src : {"w", "wu", "l", "lu"}) {
        interned.push_back("fcvt" + std::string(p) + "." + std::string(src));
        m.emplace(interned.back(), Desc{K::Arith, F::WriteFirst});
      }
    }
    add({"fcvt.s.d", "fcvt.d.s"}, K::Arith, F::WriteFirst);

    add({"mv", "li", "lui", "la", "lla", "fmv.s", "fmv.d", "fmv.x.w", "fmv.w.x", "fmv.x.d", "fmv.d.x",
         "fmv.x.s", "fmv.s.x"},
        K::Move, F::WriteFirst);

    add({"csrrw", "csrrs", "csrrc", "csrrwi", "csrrsi", "csrrci", "csrr", "csrw", "csrs", "csrc", "csrwi",
         "csrsi", "csrci", "frcsr", "frrm", "frflags", "rdcycle", "rdtime", "rdinstret"},
        K::Other, F::WriteFirst);
    add({"fscsr", "fsrm", "fsflags"}, K::Other, F::CsrWrite);
    add({"fence", "fence.i", "fence.tso", "ecall", "ebreak", "nop", "wfi", "unimp", "pause"}, K::Other,
        F::NoEffect);
    return m;
  }();
  return t;
}

std::string_view strip_ordering_suffix(std::string_view mn) {
  if (!(mn.starts_with("lr.") || mn.starts_with("sc.") || mn.starts_with("amo"))) return mn;
  for (std::string_view sfx : {".aqrl", ".aq", ".rl"}) {
    if (mn.ends_with(sfx)) return mn.substr(0, mn.size() - sfx.size());
  }
  return mn;
}

[[noreturn]] void bad_shape(const TraceRecord& rec) {
  throw MalformedLine(rec.line_no, "unexpected operands for '" + rec.mnemonic + "'");
}

void read_all_regs(const TraceRecord& rec, InstructionEffect& e, std::size_t from = 0) {
  auto ops = rec.operands();
  for (std::size_t i = from; i < ops.size(); ++i) {
    if (ops[i].kind != OperandKind::Immediate) e.reads.insert(ops[i].reg);
  }
}

void write_first_read_rest(const TraceRecord& rec, InstructionEffect& e) {
  auto ops = rec.operands();
  if (ops.empty()) return;
  if (ops[0].kind == OperandKind::Register) {
    e.writes.insert(ops[0].reg);
    read_all_regs(rec, e, 1);
  } else {
    read_all_regs(rec, e, 0);
  }
}

// [rd_or_src..., off(base)] with the mem-ref last.
const Operand& memref_last(const TraceRecord& rec, std::size_t expected) {
  auto ops = rec.operands();
  if (ops.size() != expected || ops.back().kind != OperandKind::MemRef) bad_shape(rec);
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
    if (ops[i].kind != OperandKind::Register) bad_shape(rec);
  }
  return ops.back();
}

void attach_memory(const TraceRecord& rec, const Desc& d, bool reads, bool writes, bool cache_write,
                   InstructionEffect& e) {
  if (!rec.data_addr) return;
  e.mem = MemAccess{*rec.data_addr, d.size, cache_write};
  e.reads_memory = reads;
  e.writes_memory = writes;
}

}  // namespace

InstructionEffect decode_effect(const TraceRecord& rec, DecodeMode mode) {
  InstructionEffect e;
  const auto& t = table();
  auto it = t.find(strip_ordering_suffix(rec.mnemonic));
  if (it == t.end()) {
    if (mode == DecodeMode::Strict) throw UnknownMnemonic(rec);
    e.kind = InsnKind::Other;
    e.unknown = true;
    write_first_read_rest(rec, e);
    return e;
  }
  const Desc& d = it->second;
  e.kind = d.kind;
  auto ops = rec.operands();

  switch (d.form) {
    case Form::WriteFirst:
      write_first_read_rest(rec, e);
      break;
    case Form::Load: {
      const auto& m = memref_last(rec, 2);
      e.writes.insert(ops[0].reg);
      e.reads.insert(m.reg);
      attach_memory(rec, d, true, false, false, e);
      break;
    }
    case Form::Store: {
      const auto& m = memref_last(rec, 2);
      e.reads.insert(ops[0].reg);
      e.reads.insert(m.reg);
      attach_memory(rec, d, false, true, true, e);
      break;
    }
    case Form::LoadReserved: {
      const auto& m = memref_last(rec, 2);
      e.atomic = true;
      e.writes.insert(ops[0].reg);
      e.reads.insert(m.reg);
      attach_memory(rec, d, true, false, false, e);
      break;
    }
    case Form::StoreConditional: {
      const auto& m = memref_last(rec, 3);
      e.atomic = true;
      e.writes.insert(ops[0].reg);
      e.reads.insert(ops[1].reg);
      e.reads.insert(m.reg);
      attach_memory(rec, d, false, true, true, e);
      break;
    }
    case Form::Amo: {
      const auto& m = memref_last(rec, 3);
      e.atomic = true;
      e.writes.insert(ops[0].reg);
      e.reads.insert(ops[1].reg);
      e.reads.insert(m.reg);
      attach_memory(rec, d, true, true, false, e);
      break;
    }
    case Form::Branch:
    case Form::Jr:
      read_all_regs(rec, e);
      break;
    case Form::Jal:
      if (!ops.empty() && ops[0].kind == OperandKind::Register) {
        e.writes.insert(ops[0].reg);
      } else {
        e.writes.insert(Reg{1});
      }
      break;
    case Form::Jalr:
      if (ops.size() == 1 && ops[0].kind == OperandKind::Register) {
        e.writes.insert(Reg{1});
        e.reads.insert(ops[0].reg);
      } else if (ops.size() == 1 && ops[0].kind == OperandKind::MemRef) {
        e.writes.insert(Reg{1});
        e.reads.insert(ops[0].reg);
      } else {
        write_first_read_rest(rec, e);
      }
      break;
    case Form::Ret:
      e.reads.insert(Reg{1});
      break;
    case Form::Call:
      e.writes.insert(Reg{1});
      break;
    case Form::CsrWrite:
      if (ops.size() == 1) {
        read_all_regs(rec, e);
      } else {
        write_first_read_rest(rec, e);
      }
      break;
    case Form::J:
    case Form::Tail:
    case Form::NoEffect:
      break;
  }
  return e;
}

std::uint32_t mem_access_size(std::string_view mnemonic) {
  const auto& t = table();
  auto it = t.find(strip_ordering_suffix(mnemonic));
  if (it == t.end() || it->second.size == 0) throw NotAMemoryOp(mnemonic);
  return it->second.size;
}

std::vector<std::string> supported_mnemonics() {
  std::vector<std::string> out;
  for (const auto& [name, d] : table()) out.emplace_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

void list_isa(std::ostream& os) {
  std::map<std::string_view, Desc> sorted(table().begin(), table().end());
  for (const auto& [name, d] : sorted) {
    os << name << ' ' << to_string(d.kind);
    if (d.size != 0) os << ' ' << static_cast<unsigned>(d.size);
    if (d.form == Form::LoadReserved || d.form == Form::StoreConditional || d.form == Form::Amo) os << " atomic";
    os << '\n';
  }
}

}  // namespace edag
