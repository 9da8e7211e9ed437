// Copyright 2026 The vmdeploy Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Model-file (JSON) and catalog (CSV) readers and writers, plus the synthetic
// catalog generator.

#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "vmdeploy/errors.h"
#include "vmdeploy/model.h"

namespace vmdeploy {
namespace {

using nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string LineColumn(std::string_view text, size_t byte) {
  int line = 1, column = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

const json& Field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
  return *it;
}

int64_t IntField(const json& obj, const char* key, const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_number_integer()) {
    throw ParseError(path + "." + key, "expected an integer");
  }
  return v.get<int64_t>();
}

std::string StringField(const json& obj, const char* key,
                        const std::string& path) {
  const json& v = Field(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

class ComponentResolver {
 public:
  explicit ComponentResolver(const ApplicationModel& app) : app_(app) {}
  ComponentId operator()(const json& obj, const char* key,
                         const std::string& path) const {
    std::string name = StringField(obj, key, path);
    ComponentId id = app_.FindComponent(name);
    if (id == 0) {
      throw ParseError(path + "." + key,
                       "dangling reference to undeclared component '" + name +
                           "'");
    }
    return id;
  }

 private:
  const ApplicationModel& app_;
};

Relation ParseRelation(const std::string& s, const std::string& path) {
  if (s == "=" || s == "==") return Relation::kEq;
  if (s == "<=") return Relation::kLe;
  if (s == ">=") return Relation::kGe;
  throw ParseError(path, "unknown relation '" + s + "'");
}

StructuralConstraint ParseConstraint(const json& obj, const std::string& path,
                                     const ComponentResolver& ref) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  std::string kind = StringField(obj, "kind", path);
  if (kind == "conflict") {
    return Conflict{ref(obj, "i", path), ref(obj, "j", path)};
  }
  if (kind == "colocation") {
    return Colocation{ref(obj, "i", path), ref(obj, "j", path)};
  }
  if (kind == "exclusive") {
    const json& list = Field(obj, "components", path);
    if (!list.is_array()) {
      throw ParseError(path + ".components", "expected an array");
    }
    ExclusiveDeployment e;
    for (size_t k = 0; k < list.size(); ++k) {
      json wrapper = {{"c", list[k]}};
      e.members.push_back(
          ref(wrapper, "c", path + ".components[" + std::to_string(k) + "]"));
    }
    return e;
  }
  if (kind == "require_provide") {
    return RequireProvide{ref(obj, "requirer", path),
                          ref(obj, "provider", path),
                          static_cast<int>(IntField(obj, "n_req", path)),
                          static_cast<int>(IntField(obj, "n_prov", path))};
  }
  if (kind == "full_deployment") {
    return FullDeployment{ref(obj, "component", path)};
  }
  if (kind == "bounded") {
    return BoundedInstances{
        ref(obj, "component", path),
        ParseRelation(StringField(obj, "relation", path), path + ".relation"),
        static_cast<int>(IntField(obj, "bound", path))};
  }
  throw ParseError(path + ".kind", "unknown constraint kind '" + kind + "'");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

int64_t ParseCsvInt(std::string_view field, const std::string& location) {
  int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(location, "expected an integer, got '" +
                                   std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> SplitComma(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

constexpr std::string_view kCatalogHeader =
    "id,type_name,cpu,memory,storage,price_micro";

}  // namespace

ApplicationModel LoadModel(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(LineColumn(text, e.byte == 0 ? 0 : e.byte - 1),
                     "malformed JSON");
  }
  if (!root.is_object()) throw ParseError("$", "expected a JSON object");

  ApplicationModel app;
  app.name = StringField(root, "name", "$");
  const json& components = Field(root, "components", "$");
  if (!components.is_array()) {
    throw ParseError("$.components", "expected an array");
  }
  for (size_t k = 0; k < components.size(); ++k) {
    const std::string path = "components[" + std::to_string(k) + "]";
    const json& obj = components[k];
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    Component c;
    c.id = static_cast<ComponentId>(k + 1);
    c.name = StringField(obj, "name", path);
    if (app.FindComponent(c.name) != 0) {
      throw ParseError(path + ".name", "duplicate component '" + c.name + "'");
    }
    c.requirements.cpu = IntField(obj, "cpu", path);
    c.requirements.memory = IntField(obj, "memory", path);
    c.requirements.storage = IntField(obj, "storage", path);
    if (obj.contains("lb")) c.instances_lb = static_cast<int>(IntField(obj, "lb", path));
    if (obj.contains("ub")) c.instances_ub = static_cast<int>(IntField(obj, "ub", path));
    app.components.push_back(std::move(c));
  }

  if (root.contains("constraints")) {
    const json& constraints = root["constraints"];
    if (!constraints.is_array()) {
      throw ParseError("$.constraints", "expected an array");
    }
    ComponentResolver resolver(app);
    for (size_t k = 0; k < constraints.size(); ++k) {
      app.constraints.push_back(ParseConstraint(
          constraints[k], "constraints[" + std::to_string(k) + "]", resolver));
    }
  }
  return app;
}

ApplicationModel LoadModelFile(const std::string& path) {
  return LoadModel(ReadFile(path));
}

std::string SaveModel(const ApplicationModel& app) {
  auto name = [&app](ComponentId id) { return app.component(id).name; };
  json root;
  root["name"] = app.name;
  root["components"] = json::array();
  for (const Component& c : app.components) {
    json obj = {{"name", c.name},
                {"cpu", c.requirements.cpu},
                {"memory", c.requirements.memory},
                {"storage", c.requirements.storage}};
    if (c.instances_lb != 1) obj["lb"] = c.instances_lb;
    if (c.instances_ub) obj["ub"] = *c.instances_ub;
    root["components"].push_back(std::move(obj));
  }
  root["constraints"] = json::array();
  for (const StructuralConstraint& sc : app.constraints) {
    json obj = {{"kind", std::string(KindName(sc))}};
    std::visit(Overloaded{
                   [&](const Conflict& x) {
                     obj["i"] = name(x.i);
                     obj["j"] = name(x.j);
                   },
                   [&](const Colocation& x) {
                     obj["i"] = name(x.i);
                     obj["j"] = name(x.j);
                   },
                   [&](const ExclusiveDeployment& x) {
                     obj["components"] = json::array();
                     for (ComponentId id : x.members) {
                       obj["components"].push_back(name(id));
                     }
                   },
                   [&](const RequireProvide& x) {
                     obj["requirer"] = name(x.requirer);
                     obj["provider"] = name(x.provider);
                     obj["n_req"] = x.n_req;
                     obj["n_prov"] = x.n_prov;
                   },
                   [&](const FullDeployment& x) {
                     obj["component"] = name(x.component);
                   },
                   [&](const BoundedInstances& x) {
                     obj["component"] = name(x.component);
                     obj["relation"] = std::string(RelationSymbol(x.relation));
                     obj["bound"] = x.bound;
                   },
               },
               sc);
    root["constraints"].push_back(std::move(obj));
  }
  return root.dump(2) + "\n";
}

OfferCatalog LoadCatalog(std::string_view text, std::string source,
                         bool allow_duplicates) {
  OfferCatalog catalog;
  catalog.source = std::move(source);
  std::set<std::tuple<int64_t, int64_t, int64_t, int64_t>> seen;

  int line_no = 0;
  bool header_seen = false;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    if (!header_seen) {
      if (line != kCatalogHeader) {
        throw ParseError(where, "expected header '" +
                                    std::string(kCatalogHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields = SplitComma(line);
    if (fields.size() != 6) {
      throw ParseError(where, "malformed row: expected 6 fields, got " +
                                  std::to_string(fields.size()));
    }
    VmOffer offer;
    offer.id = static_cast<OfferId>(ParseCsvInt(fields[0], where + " id"));
    if (offer.id != catalog.size() + 1) {
      throw ParseError(where + " id", "offer ids must be 1..O in file order");
    }
    offer.type_name = std::string(fields[1]);
    if (offer.type_name.empty()) throw ParseError(where, "empty type_name");
    offer.capacity.cpu = ParseCsvInt(fields[2], where + " cpu");
    offer.capacity.memory = ParseCsvInt(fields[3], where + " memory");
    offer.capacity.storage = ParseCsvInt(fields[4], where + " storage");
    offer.price = ParseCsvInt(fields[5], where + " price_micro");
    if (offer.capacity.cpu < 0 || offer.capacity.memory < 0 ||
        offer.capacity.storage < 0) {
      throw ParseError(where, "negative capacity");
    }
    if (offer.price <= 0) {
      throw ParseError(where + " price_micro", "non-positive price");
    }
    auto key = std::make_tuple(offer.capacity.cpu, offer.capacity.memory,
                               offer.capacity.storage, offer.price);
    if (!seen.insert(key).second && !allow_duplicates) {
      throw ParseError(where, "duplicate (capacity, price) row");
    }
    catalog.offers.push_back(std::move(offer));
  }
  if (!header_seen) throw ParseError("line 1", "missing header");
  if (catalog.offers.empty()) throw InputError("empty catalog");
  return catalog;
}

OfferCatalog LoadCatalogFile(const std::string& path, bool allow_duplicates) {
  return LoadCatalog(ReadFile(path), path, allow_duplicates);
}

std::string SaveCatalog(const OfferCatalog& catalog) {
  std::ostringstream out;
  out << kCatalogHeader << "\n";
  for (const VmOffer& o : catalog.offers) {
    out << o.id << ',' << o.type_name << ',' << o.capacity.cpu << ','
        << o.capacity.memory << ',' << o.capacity.storage << ',' << o.price
        << "\n";
  }
  return out.str();
}

OfferCatalog ResolveCatalog(const std::string& spec) {
  constexpr std::string_view kPrefix = "seed:";
  if (spec.rfind(kPrefix, 0) != 0) return LoadCatalogFile(spec);
  std::string_view rest = std::string_view(spec).substr(kPrefix.size());
  size_t comma = rest.find(',');
  if (comma == std::string_view::npos) {
    throw InputError("synthetic catalog must be written seed:<seed>,<n>");
  }
  int64_t seed = ParseCsvInt(rest.substr(0, comma), spec);
  int64_t n = ParseCsvInt(rest.substr(comma + 1), spec);
  if (seed < 0) throw InputError("seed must be >= 0");
  return GenerateCatalog(static_cast<uint64_t>(seed), static_cast<int>(n));
}

// Capacities: cpu = 2^u (1..64), memory = cpu * {512,1024,2048,4096} MB
// (512..262144), storage uniform in 10..4000 GB. Price in micro-units/hour:
// 20000 per core + 5 per MB + 20 per GB, inflated by 0..19 percent noise.
OfferCatalog GenerateCatalog(uint64_t seed, int n) {
  if (n < 1) throw InputError("catalog size must be >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&rng](int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
  };
  static constexpr std::string_view kFamilies[] = {"gp", "co", "mo", "so"};

  OfferCatalog catalog;
  catalog.source = "synthetic:" + std::to_string(seed);
  std::set<std::tuple<int64_t, int64_t, int64_t, int64_t>> seen;
  while (catalog.size() < n) {
    VmOffer o;
    const int64_t cores = int64_t{1} << draw(0, 6);
    const int64_t per_core = int64_t{512} << draw(0, 3);
    o.capacity.cpu = cores;
    o.capacity.memory = cores * per_core;
    o.capacity.storage = draw(10, 4000);
    const int64_t base =
        cores * 20000 + o.capacity.memory * 5 + o.capacity.storage * 20;
    o.price = base * (100 + draw(0, 19)) / 100;
    auto key = std::make_tuple(o.capacity.cpu, o.capacity.memory,
                               o.capacity.storage, o.price);
    if (!seen.insert(key).second) continue;
    o.id = catalog.size() + 1;
    o.type_name = std::string(kFamilies[draw(0, 3)]) + "." +
                  std::to_string(cores) + "x" +
                  std::to_string(o.capacity.memory / 512) + "-" +
                  std::to_string(o.id);
    catalog.offers.push_back(std::move(o));
  }
  return catalog;
}

}  // namespace vmdeploy
