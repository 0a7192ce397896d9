// Copyright 2026 The Spikesound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// SPKMODEL v1:
//
//   SPKMODEL v1
//   neuron tau_m=<ms> tau_s=<ms> threshold=<v> rule=<r> epochs=<n> seed=<s>
//          classes=<C> afferents=<N>            (one line)
//   desired <t1> <t2> ...                        (possibly empty)
//   <label>                                      (C times: label line,
//   <w_1> ... <w_N>                               then weight line)

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "spikesound/learning.h"

namespace spikesound {
namespace {

std::string Fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

bool NextLine(std::istream& is, std::string* line) {
  if (!std::getline(is, *line)) return false;
  if (!line->empty() && line->back() == '\r') line->pop_back();
  return true;
}

[[noreturn]] void Truncated() { throw DataError("truncated model file"); }

double ParseDouble(const std::string& token, const std::string& what) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    throw DataError("model file: bad number '" + token + "' in " + what);
  }
  return v;
}

}  // namespace

void WriteModel(std::ostream& os, const Model& model) {
  const int n = model.n_afferents();
  os << "SPKMODEL v1\n";
  os << "neuron tau_m=" << Fmt9(model.params.tau_m)
     << " tau_s=" << Fmt9(model.params.tau_s)
     << " threshold=" << Fmt9(model.params.threshold)
     << " rule=" << RuleName(model.rule) << " epochs=" << model.epochs_run
     << " seed=" << model.seed << " classes=" << model.n_classes()
     << " afferents=" << n << "\n";
  os << "desired";
  for (double t : model.desired_times) os << ' ' << Fmt9(t);
  os << "\n";
  for (int c = 0; c < model.n_classes(); ++c) {
    os << model.labels[c] << "\n";
    for (int i = 0; i < model.weights[c].size(); ++i) {
      if (i) os << ' ';
      os << Fmt9(model.weights[c][i]);
    }
    os << "\n";
  }
}

Model ReadModel(std::istream& is) {
  std::string line;
  if (!NextLine(is, &line)) throw DataError("not a model file");
  {
    std::istringstream head(line);
    std::string magic, version;
    head >> magic >> version;
    if (magic != "SPKMODEL") throw DataError("not a model file");
    if (version != "v1") {
      throw DataError("unsupported model version '" + version + "' (expected v1)");
    }
  }
  if (!NextLine(is, &line)) Truncated();
  std::map<std::string, std::string> fields;
  {
    std::istringstream ss(line);
    std::string tag, kv;
    ss >> tag;
    if (tag != "neuron") throw DataError("model file: missing neuron line");
    while (ss >> kv) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        throw DataError("model file: bad field '" + kv + "'");
      }
      fields[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  const auto field = [&fields](const std::string& key) {
    auto it = fields.find(key);
    if (it == fields.end()) throw DataError("model file: missing field " + key);
    return it->second;
  };
  Model m;
  try {
    m.params = NeuronParams::Make(ParseDouble(field("tau_m"), "tau_m"),
                                  ParseDouble(field("tau_s"), "tau_s"),
                                  ParseDouble(field("threshold"), "threshold"));
    m.rule = ParseRule(field("rule"));
    m.epochs_run = std::stoi(field("epochs"));
    m.seed = std::stoull(field("seed"));
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("model file: bad neuron line: ") + e.what());
  }
  const int classes = static_cast<int>(ParseDouble(field("classes"), "classes"));
  const int n = static_cast<int>(ParseDouble(field("afferents"), "afferents"));
  if (classes < 0 || n < 0) throw DataError("model file: negative sizes");

  if (!NextLine(is, &line)) Truncated();
  {
    std::istringstream ss(line);
    std::string tag, tok;
    ss >> tag;
    if (tag != "desired") throw DataError("model file: missing desired line");
    while (ss >> tok) m.desired_times.push_back(ParseDouble(tok, "desired"));
  }
  for (int c = 0; c < classes; ++c) {
    if (!NextLine(is, &line)) Truncated();
    m.labels.push_back(line);
    if (!NextLine(is, &line)) Truncated();
    std::istringstream ss(line);
    std::vector<double> values;
    std::string tok;
    while (ss >> tok) values.push_back(ParseDouble(tok, "class '" + m.labels.back() + "'"));
    if (static_cast<int>(values.size()) != n) {
      throw DataError("model file: class '" + m.labels.back() + "' has " +
                      std::to_string(values.size()) + " weights, expected " +
                      std::to_string(n));
    }
    m.weights.push_back(Eigen::Map<Eigen::VectorXd>(values.data(), n));
  }
  return m;
}

void SaveModel(const std::string& path, const Model& model) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  WriteModel(os, model);
  if (!os) throw DataError("write failed: " + path);
}

Model LoadModel(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path);
  return ReadModel(is);
}

}  // namespace spikesound
