#include "depscope/bytecode/classfile.hpp"

#include <stdexcept>

#include "depscope/digest.hpp"

namespace depscope::bytecode {
namespace {

struct TruncatedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u1() {
    need(1);
    return data_[pos_++];
  }
  std::uint16_t u2() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u4() {
    need(4);
    std::uint32_t v = (static_cast<std::uint32_t>(data_[pos_]) << 24) |
                      (static_cast<std::uint32_t>(data_[pos_ + 1]) << 16) |
                      (static_cast<std::uint32_t>(data_[pos_ + 2]) << 8) |
                      static_cast<std::uint32_t>(data_[pos_ + 3]);
    pos_ += 4;
    return v;
  }
  const std::uint8_t* bytes(std::size_t n) {
    need(n);
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  void skip(std::size_t n) { need(n), pos_ += n; }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > size_) throw TruncatedError("truncated class file");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

struct CpEntry {
  std::uint8_t tag = 0;
  std::uint16_t a = 0, b = 0;
  std::uint32_t word = 0;
  std::uint64_t dword = 0;
  std::string utf8;
};

// constant pool tags
enum : std::uint8_t {
  kUtf8 = 1,
  kInteger = 3,
  kFloat = 4,
  kLong = 5,
  kDouble = 6,
  kClass = 7,
  kString = 8,
  kFieldref = 9,
  kMethodref = 10,
  kInterfaceMethodref = 11,
  kNameAndType = 12,
  kMethodHandle = 15,
  kMethodType = 16,
  kDynamic = 17,
  kInvokeDynamic = 18,
  kModule = 19,
  kPackage = 20,
};

class ConstPool {
 public:
  void parse(Reader& r) {
    std::uint16_t count = r.u2();
    entries_.resize(count);
    for (std::uint16_t i = 1; i < count; ++i) {
      CpEntry& e = entries_[i];
      e.tag = r.u1();
      switch (e.tag) {
        case kUtf8: {
          std::uint16_t len = r.u2();
          const std::uint8_t* p = r.bytes(len);
          e.utf8.assign(reinterpret_cast<const char*>(p), len);
          break;
        }
        case kInteger:
        case kFloat:
          e.word = r.u4();
          break;
        case kLong:
        case kDouble:
          e.dword = (static_cast<std::uint64_t>(r.u4()) << 32) | r.u4();
          ++i;  // occupies two slots
          break;
        case kClass:
        case kString:
        case kMethodType:
        case kModule:
        case kPackage:
          e.a = r.u2();
          break;
        case kMethodHandle:
          e.a = r.u1();
          e.b = r.u2();
          break;
        case kFieldref:
        case kMethodref:
        case kInterfaceMethodref:
        case kNameAndType:
        case kDynamic:
        case kInvokeDynamic:
          e.a = r.u2();
          e.b = r.u2();
          break;
        default:
          throw TruncatedError("unknown constant pool tag " + std::to_string(e.tag));
      }
    }
  }

  const CpEntry& at(std::uint16_t i) const {
    if (i == 0 || i >= entries_.size()) throw TruncatedError("constant pool index out of range");
    return entries_[i];
  }

  const std::string& utf8(std::uint16_t i) const {
    const CpEntry& e = at(i);
    if (e.tag != kUtf8) throw TruncatedError("expected Utf8 constant");
    return e.utf8;
  }

  std::string class_name(std::uint16_t i) const {
    const CpEntry& e = at(i);
    if (e.tag != kClass) throw TruncatedError("expected Class constant");
    return utf8(e.a);
  }

  MethodId member_ref(std::uint16_t i) const {
    const CpEntry& e = at(i);
    if (e.tag != kFieldref && e.tag != kMethodref && e.tag != kInterfaceMethodref)
      throw TruncatedError("expected member reference constant");
    const CpEntry& nat = at(e.b);
    return {class_name(e.a), utf8(nat.a), utf8(nat.b)};
  }

  // Symbolic form for fingerprinting: stable under constant-pool renumbering.
  std::string symbol(std::uint16_t i) const {
    const CpEntry& e = at(i);
    switch (e.tag) {
      case kUtf8: return "u:" + e.utf8;
      case kInteger: return "i:" + std::to_string(static_cast<std::int32_t>(e.word));
      case kFloat: return "f:" + std::to_string(e.word);  // raw bit pattern
      case kLong: return "l:" + std::to_string(static_cast<std::int64_t>(e.dword));
      case kDouble: return "d:" + std::to_string(e.dword);  // raw bit pattern
      case kClass: return "c:" + utf8(e.a);
      case kString: return "s:" + utf8(e.a);
      case kMethodType: return "mt:" + utf8(e.a);
      case kModule: return "mod:" + utf8(e.a);
      case kPackage: return "pkg:" + utf8(e.a);
      case kNameAndType: return "nt:" + utf8(e.a) + ":" + utf8(e.b);
      case kMethodHandle: return "mh:" + std::to_string(e.a) + ":" + symbol(e.b);
      case kFieldref:
      case kMethodref:
      case kInterfaceMethodref: {
        MethodId id = member_ref(i);
        return "r:" + id.display();
      }
      case kDynamic:
      case kInvokeDynamic:
        return "dy:" + std::to_string(e.a) + ":" + symbol(e.b);
      default:
        return "?";
    }
  }

 private:
  std::vector<CpEntry> entries_;
};

// operand byte counts per opcode; -1 marks variable-length forms
constexpr int kOperands[256] = {
    /*0x00*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x10*/ 1, 2, 1, 2, 2, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0,
    /*0x20*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x30*/ 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0,
    /*0x40*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x50*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x60*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x70*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x80*/ 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0x90*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 2, 2, 2, 2, 2,
    /*0xa0*/ 2, 2, 2, 2, 2, 2, 2, 2, 2, 1, -1, -1, 0, 0, 0, 0,
    /*0xb0*/ 0, 0, 2, 2, 2, 2, 2, 2, 2, 4, 4, 2, 1, 2, 0, 0,
    /*0xc0*/ 2, 2, 0, 0, -1, 3, 2, 2, 4, 4, 0, 0, 0, 0, 0, 0,
    /*0xd0*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0xe0*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
    /*0xf0*/ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
};

// opcodes whose 2-byte operand is a constant-pool index
bool cp_indexed(std::uint8_t op) {
  switch (op) {
    case 0x12:  // ldc (1-byte index)
    case 0x13:  // ldc_w
    case 0x14:  // ldc2_w
    case 0xb2:  // getstatic
    case 0xb3:  // putstatic
    case 0xb4:  // getfield
    case 0xb5:  // putfield
    case 0xb6:  // invokevirtual
    case 0xb7:  // invokespecial
    case 0xb8:  // invokestatic
    case 0xb9:  // invokeinterface
    case 0xba:  // invokedynamic
    case 0xbb:  // new
    case 0xbd:  // anewarray
    case 0xc0:  // checkcast
    case 0xc1:  // instanceof
    case 0xc5:  // multianewarray
      return true;
    default:
      return false;
  }
}

void analyze_code(const std::uint8_t* code, std::size_t len, const ConstPool& cp,
                  const std::uint8_t* exc_table, std::size_t exc_count, MethodModel& m) {
  Digest64 dig;
  std::size_t pc = 0;
  auto u16at = [&](std::size_t i) -> std::uint16_t {
    if (i + 2 > len) throw TruncatedError("truncated code");
    return static_cast<std::uint16_t>((code[i] << 8) | code[i + 1]);
  };
  auto s32at = [&](std::size_t i) -> std::int32_t {
    if (i + 4 > len) throw TruncatedError("truncated code");
    return static_cast<std::int32_t>((static_cast<std::uint32_t>(code[i]) << 24) |
                                     (static_cast<std::uint32_t>(code[i + 1]) << 16) |
                                     (static_cast<std::uint32_t>(code[i + 2]) << 8) |
                                     static_cast<std::uint32_t>(code[i + 3]));
  };

  while (pc < len) {
    std::uint8_t op = code[pc];
    dig.update_u8(op);
    if (op == 0xaa) {  // tableswitch: pad, default, low, high, offsets
      std::size_t p = (pc + 4) & ~std::size_t{3};
      std::int32_t def = s32at(p);
      std::int32_t low = s32at(p + 4);
      std::int32_t high = s32at(p + 8);
      if (high < low) throw TruncatedError("bad tableswitch");
      dig.update_u32(static_cast<std::uint32_t>(def));
      dig.update_u32(static_cast<std::uint32_t>(low));
      dig.update_u32(static_cast<std::uint32_t>(high));
      std::size_t count = static_cast<std::size_t>(high - low + 1);
      for (std::size_t i = 0; i < count; ++i)
        dig.update_u32(static_cast<std::uint32_t>(s32at(p + 12 + i * 4)));
      pc = p + 12 + count * 4;
      continue;
    }
    if (op == 0xab) {  // lookupswitch
      std::size_t p = (pc + 4) & ~std::size_t{3};
      std::int32_t def = s32at(p);
      std::int32_t npairs = s32at(p + 4);
      if (npairs < 0) throw TruncatedError("bad lookupswitch");
      dig.update_u32(static_cast<std::uint32_t>(def));
      dig.update_u32(static_cast<std::uint32_t>(npairs));
      for (std::int32_t i = 0; i < npairs; ++i) {
        dig.update_u32(static_cast<std::uint32_t>(s32at(p + 8 + i * 8)));
        dig.update_u32(static_cast<std::uint32_t>(s32at(p + 12 + i * 8)));
      }
      pc = p + 8 + static_cast<std::size_t>(npairs) * 8;
      continue;
    }
    if (op == 0xc4) {  // wide
      if (pc + 2 > len) throw TruncatedError("truncated wide");
      std::uint8_t mod = code[pc + 1];
      dig.update_u8(mod);
      std::size_t extra = mod == 0x84 ? 4 : 2;  // iinc has extra const
      if (pc + 2 + extra > len) throw TruncatedError("truncated wide");
      dig.update(code + pc + 2, extra);
      pc += 2 + extra;
      continue;
    }

    int operands = kOperands[op];
    if (operands < 0) throw TruncatedError("unexpected variable-length opcode");
    if (pc + 1 + static_cast<std::size_t>(operands) > len) throw TruncatedError("truncated code");

    if (cp_indexed(op)) {
      std::uint16_t index =
          op == 0x12 ? code[pc + 1] : u16at(pc + 1);
      dig.update(cp.symbol(index));
      // trailing non-index operand bytes (invokeinterface count, array dims)
      std::size_t index_bytes = op == 0x12 ? 1 : 2;
      if (static_cast<std::size_t>(operands) > index_bytes)
        dig.update(code + pc + 1 + index_bytes, static_cast<std::size_t>(operands) - index_bytes);

      switch (op) {
        case 0xb2: m.uses.push_back({RefKind::GetStatic, cp.member_ref(index)}); break;
        case 0xb3: m.uses.push_back({RefKind::PutStatic, cp.member_ref(index)}); break;
        case 0xb4: m.uses.push_back({RefKind::GetField, cp.member_ref(index)}); break;
        case 0xb5: m.uses.push_back({RefKind::PutField, cp.member_ref(index)}); break;
        case 0xb6: m.uses.push_back({RefKind::InvokeVirtual, cp.member_ref(index)}); break;
        case 0xb7: m.uses.push_back({RefKind::InvokeSpecial, cp.member_ref(index)}); break;
        case 0xb8: m.uses.push_back({RefKind::InvokeStatic, cp.member_ref(index)}); break;
        case 0xb9: m.uses.push_back({RefKind::InvokeInterface, cp.member_ref(index)}); break;
        case 0xba: ++m.invokedynamic_sites; break;
        default: break;
      }
    } else if (operands > 0) {
      dig.update(code + pc + 1, static_cast<std::size_t>(operands));
    }
    pc += 1 + static_cast<std::size_t>(operands);
  }

  // exception handlers are part of the body semantics
  for (std::size_t i = 0; i < exc_count; ++i) {
    const std::uint8_t* e = exc_table + i * 8;
    for (int k = 0; k < 6; ++k) dig.update_u8(e[k]);
    std::uint16_t type = static_cast<std::uint16_t>((e[6] << 8) | e[7]);
    dig.update(type == 0 ? std::string("any") : cp.class_name(type));
  }

  m.fingerprint = dig.value();
}

}  // namespace

std::uint64_t empty_body_digest() {
  static const std::uint64_t v = Digest64::of("<no-code>");
  return v;
}

ClassParseOutcome parse_class(const std::vector<std::uint8_t>& bytes) {
  ClassParseOutcome res;
  try {
    Reader r(bytes.data(), bytes.size());
    if (r.u4() != 0xCAFEBABE) {
      res.error = "bad magic";
      return res;
    }
    r.u2();  // minor
    std::uint16_t major = r.u2();
    if (major < 45) {
      res.error = "unsupported class file version " + std::to_string(major);
      return res;
    }
    if (major > 61) res.version_warning = true;

    ConstPool cp;
    cp.parse(r);

    ClassModel& cls = res.cls;
    cls.major_version = major;
    cls.access = r.u2();
    cls.name = cp.class_name(r.u2());
    std::uint16_t super = r.u2();
    cls.super_name = super == 0 ? std::string() : cp.class_name(super);
    std::uint16_t icount = r.u2();
    for (std::uint16_t i = 0; i < icount; ++i) cls.interfaces.push_back(cp.class_name(r.u2()));

    auto skip_attrs = [&](Reader& rr) {
      std::uint16_t n = rr.u2();
      for (std::uint16_t i = 0; i < n; ++i) {
        rr.u2();
        std::uint32_t len = rr.u4();
        rr.skip(len);
      }
    };

    std::uint16_t fcount = r.u2();
    for (std::uint16_t i = 0; i < fcount; ++i) {
      FieldModel f;
      f.access = r.u2();
      f.name = cp.utf8(r.u2());
      f.descriptor = cp.utf8(r.u2());
      skip_attrs(r);
      cls.fields.push_back(std::move(f));
    }

    std::uint16_t mcount = r.u2();
    for (std::uint16_t i = 0; i < mcount; ++i) {
      MethodModel m;
      m.access = r.u2();
      m.name = cp.utf8(r.u2());
      m.descriptor = cp.utf8(r.u2());
      m.fingerprint = empty_body_digest();
      std::uint16_t acount = r.u2();
      for (std::uint16_t a = 0; a < acount; ++a) {
        const std::string& aname = cp.utf8(r.u2());
        std::uint32_t alen = r.u4();
        if (aname == "Code") {
          const std::uint8_t* attr = r.bytes(alen);
          Reader cr(attr, alen);
          cr.u2();  // max_stack
          cr.u2();  // max_locals
          std::uint32_t code_len = cr.u4();
          const std::uint8_t* code = cr.bytes(code_len);
          std::uint16_t exc_count = cr.u2();
          const std::uint8_t* exc = cr.bytes(static_cast<std::size_t>(exc_count) * 8);
          m.has_code = true;
          analyze_code(code, code_len, cp, exc, exc_count, m);
          // nested attributes of Code (LineNumberTable etc.) are debug info
        } else {
          r.skip(alen);
        }
      }
      cls.methods.push_back(std::move(m));
    }

    std::uint16_t acount = r.u2();
    for (std::uint16_t a = 0; a < acount; ++a) {
      const std::string& aname = cp.utf8(r.u2());
      std::uint32_t alen = r.u4();
      if (aname == "InnerClasses") {
        const std::uint8_t* attr = r.bytes(alen);
        Reader ar(attr, alen);
        std::uint16_t n = ar.u2();
        for (std::uint16_t i = 0; i < n; ++i) {
          std::uint16_t inner = ar.u2();
          ar.u2();  // outer
          ar.u2();  // inner name
          std::uint16_t access = ar.u2();
          if (inner != 0 && cp.class_name(inner) == cls.name) {
            cls.has_inner_info = true;
            cls.inner_access = access;
          }
        }
      } else {
        r.skip(alen);
      }
    }

    res.ok = true;
    return res;
  } catch (const TruncatedError& e) {
    res.ok = false;
    res.error = e.what();
    return res;
  }
}

}  // namespace depscope::bytecode
