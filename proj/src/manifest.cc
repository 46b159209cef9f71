// asrlab/manifest.cc

// Copyright 2026  asrlab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "asrlab/manifest.hh"

#include <fstream>
#include <set>
#include <sstream>

#include "asrlab/common.hh"
#include "asrlab/state-inventory.hh"

namespace asrlab {

StateInventory StateInventory::Deserialize(const std::string &text) {
  StateInventory inv;
  std::istringstream is(text);
  std::string key;
  int value;
  while (is >> key >> value) {
    if (key == "nonspeech") inv.num_nonspeech = value;
    else if (key == "speech") inv.num_speech = value;
    else throw InputError("unknown inventory key: " + key);
  }
  Require(inv.num_nonspeech > 0 && inv.num_speech > 0,
          "inventory must name both classes");
  return inv;
}

std::vector<std::string> ManifestEntry::Words() const {
  return SplitString(transcript, ' ');
}

std::vector<ManifestEntry> CorpusManifest::Split(const std::string &split) const {
  std::vector<ManifestEntry> out;
  for (const auto &e : entries)
    if (e.split == split) out.push_back(e);
  return out;
}

void CorpusManifest::CheckIdsUnique() const {
  std::set<std::string> seen;
  for (const auto &e : entries)
    if (!seen.insert(e.id).second)
      throw InputError("duplicate utterance id: " + e.id);
}

void WriteManifest(const std::string &path, const CorpusManifest &manifest) {
  std::ostringstream os;
  os << "#manifest\tseed=" << manifest.seed
     << "\tdigest=" << manifest.config_digest << "\n";
  for (const auto &e : manifest.entries) {
    os << e.id << '\t' << e.audio_path << '\t' << e.transcript << '\t'
       << e.alignment_path << '\t' << e.split << '\n';
  }
  WriteTextFile(path, os.str());
}

CorpusManifest ReadManifest(const std::string &path) {
  CorpusManifest m;
  std::istringstream is(ReadTextFile(path));
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("#manifest", 0) == 0) {
      first = false;
      for (const auto &field : SplitString(line, '\t')) {
        auto kv = SplitString(field, '=');
        if (kv.size() != 2) continue;
        if (kv[0] == "seed") m.seed = std::stoull(kv[1]);
        if (kv[0] == "digest") m.config_digest = kv[1];
      }
      continue;
    }
    first = false;
    auto fields = SplitString(line, '\t', /*keep_empty=*/true);
    if (fields.size() != 5)
      throw InputError(StrCat("bad manifest line (", fields.size(),
                              " fields): ", line));
    m.entries.push_back(
        {fields[0], fields[1], fields[2], fields[3], fields[4]});
  }
  m.CheckIdsUnique();
  return m;
}

void WriteAlignment(const std::string &path, const std::vector<int> &states) {
  std::ostringstream os;
  for (int s : states) os << s << '\n';
  WriteTextFile(path, os.str());
}

std::vector<int> ReadAlignment(const std::string &path) {
  std::vector<int> states;
  std::istringstream is(ReadTextFile(path));
  std::string line;
  while (std::getline(is, line)) {
    line = TrimString(line);
    if (line.empty()) continue;
    states.push_back(std::stoi(line));
  }
  return states;
}

}  // namespace asrlab
