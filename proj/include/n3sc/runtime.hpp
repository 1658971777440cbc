#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "n3sc/bridge_ir.hpp"

namespace n3sc {

struct Value;
using ValuePtr = std::shared_ptr<Value>;

/// Runtime value: a scalar or an entity (typed record). Entities are shared
/// mutable nodes, so assignments alias the same record everywhere it appears.
struct Value {
  enum class Kind { Str, Int, Dec, Bool, Entity };

  struct Field {
    enum class Card { Single, Array, Dict };
    Card card = Card::Single;
    ValuePtr single;
    std::vector<ValuePtr> array;
    std::vector<std::pair<std::string, ValuePtr>> dict;  // insertion order
  };

  Kind kind = Kind::Str;
  std::string str;
  long long integer = 0;
  double decimal = 0.0;
  bool boolean = false;

  std::string type_tag;  // ADT name or fixture-provided tag
  std::string id;
  std::map<std::string, Field> fields;  // by field name

  static ValuePtr make_string(std::string s);
  static ValuePtr make_int(long long v);
  static ValuePtr make_dec(double v);
  static ValuePtr make_bool(bool v);
  static ValuePtr make_entity(std::string type_tag, std::string id);

  bool is_numeric() const { return kind == Kind::Int || kind == Kind::Dec; }
  double as_number() const { return kind == Kind::Int ? static_cast<double>(integer) : decimal; }
};

/// Canonical rendering of a value for transcripts and event comparison:
/// entities render as {"type":..., fields...} with entity-valued fields
/// reduced to their ids.
std::string canonical_value(const ValuePtr& v, const Model& model);

struct RemoteEntry {
  std::string type;                          // ADT name
  std::map<std::string, std::string> params; // property local name -> value
  std::vector<ValuePtr> results;
};

struct Fixture {
  ValuePtr request;
  std::vector<RemoteEntry> remote;
  std::vector<ValuePtr> extra_params;  // for multi-parameter entry functions
};

/// Parses and type-checks a fixture file against the program's model.
/// Selector fields named by an entry's params are materialized on its result
/// records when absent, keeping oracle filtering and the merged dataset
/// consistent. Throws fixture.type on mismatch.
Fixture load_fixture(const std::string& json_text, const BridgeProgram& program);

struct TranscriptEntry {
  enum class Kind { FunctionEntered, RemoteRequested, CallbackInvoked, EventEmitted };
  Kind kind = Kind::FunctionEntered;
  std::string name;                           // function, resource type, or event
  std::vector<std::pair<std::string, std::string>> params;  // remote requests
  size_t result_count = 0;                    // callback invocations
  std::string payload;                        // canonical event payload
};

struct ExecutionTranscript {
  std::vector<TranscriptEntry> entries;

  std::vector<TranscriptEntry> events() const;
  std::string to_json_lines() const;
};

/// Deterministically executes the compiled program against the fixture,
/// simulating the client -> contract -> oracle flow. Remote results are
/// processed per record; structurally identical event payloads are emitted
/// once.
ExecutionTranscript execute_contract(const BridgeProgram& program, const Fixture& fixture);

}  // namespace n3sc
