#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depscope/bytecode/classfile.hpp"

// Test-only JVM class-file assembler. Produces real class files without a
// JDK, with two properties the suites depend on: the constant pool can be
// permuted via a seed without changing program meaning, and debug attributes
// (SourceFile, LineNumberTable) can be toggled freely. The recorded
// instruction lists double as the independent call-graph oracle.
namespace testsupport {

struct PoolConst {
  std::uint8_t tag = 0;  // 1 utf8, 3 int, 7 class, 8 string, 9/10/11 refs, 12 name-and-type
  std::string s1, s2, s3;
  std::int32_t num = 0;

  auto operator<=>(const PoolConst&) const = default;
};

struct Instruction {
  bool raw = false;
  std::vector<std::uint8_t> bytes;  // raw: verbatim code bytes
  std::uint8_t opcode = 0;          // cp-indexed form
  PoolConst constant;
  std::vector<std::uint8_t> tail;  // e.g. invokeinterface count + zero
};

struct ExceptionEntry {
  std::uint16_t start_pc = 0;
  std::uint16_t end_pc = 0;
  std::uint16_t handler_pc = 0;
  std::string catch_type;  // empty = catch-all
};

class MethodBuilder {
 public:
  MethodBuilder(std::uint16_t access, std::string name, std::string descriptor)
      : access_(access), name_(std::move(name)), descriptor_(std::move(descriptor)) {}

  MethodBuilder& op(std::uint8_t opcode);
  MethodBuilder& op_u8(std::uint8_t opcode, std::uint8_t operand);
  MethodBuilder& op_u16(std::uint8_t opcode, std::uint16_t operand);
  MethodBuilder& invoke_virtual(const depscope::bytecode::MethodId& target);
  MethodBuilder& invoke_special(const depscope::bytecode::MethodId& target);
  MethodBuilder& invoke_static(const depscope::bytecode::MethodId& target);
  MethodBuilder& invoke_interface(const depscope::bytecode::MethodId& target, std::uint8_t count);
  MethodBuilder& get_static(const depscope::bytecode::MethodId& target);
  MethodBuilder& put_field(const depscope::bytecode::MethodId& target);
  MethodBuilder& get_field(const depscope::bytecode::MethodId& target);
  MethodBuilder& ldc_string(const std::string& value);
  MethodBuilder& ldc_int(std::int32_t value);
  MethodBuilder& raw(std::vector<std::uint8_t> bytes);
  // padding computed from the current code size, branch offsets taken as-is
  MethodBuilder& tableswitch(std::int32_t deflt, std::int32_t low,
                             const std::vector<std::int32_t>& jumps);
  MethodBuilder& lookupswitch(std::int32_t deflt,
                              const std::vector<std::pair<std::int32_t, std::int32_t>>& pairs);
  MethodBuilder& catch_block(const ExceptionEntry& entry);
  MethodBuilder& no_code();  // abstract or native body

  std::size_t code_size() const;

  std::uint16_t access_;
  std::string name_;
  std::string descriptor_;
  bool has_code_ = true;
  std::vector<Instruction> code_;
  std::vector<ExceptionEntry> exceptions_;
};

struct FieldDecl {
  std::uint16_t access = 0;
  std::string name;
  std::string descriptor;
};

class ClassBuilder {
 public:
  explicit ClassBuilder(std::string name, std::string super = "java/lang/Object");

  ClassBuilder& access(std::uint16_t flags);
  ClassBuilder& major(std::uint16_t version);
  ClassBuilder& implement(std::string iface);
  ClassBuilder& field(std::uint16_t access, std::string name, std::string descriptor);
  MethodBuilder& method(std::uint16_t access, std::string name, std::string descriptor);
  // debug-attribute toggles; fingerprints must not see either
  ClassBuilder& source_file(std::string name);
  ClassBuilder& line_numbers(bool enabled);

  // seed 0 keeps insertion order; any other seed shuffles the constant pool
  std::vector<std::uint8_t> build(std::uint64_t permutation_seed = 0) const;

  const std::string& name() const { return name_; }
  const std::string& super_name() const { return super_; }
  const std::vector<std::string>& interface_names() const { return interfaces_; }
  const std::deque<MethodBuilder>& methods() const { return methods_; }

 private:
  std::string name_;
  std::string super_;
  std::uint16_t access_ = 0x0021;  // public super
  std::uint16_t major_ = 52;
  std::vector<std::string> interfaces_;
  std::vector<FieldDecl> fields_;
  // deque keeps MethodBuilder references stable across method() calls
  std::deque<MethodBuilder> methods_;
  std::string source_file_;
  bool line_numbers_ = false;
};

}  // namespace testsupport
