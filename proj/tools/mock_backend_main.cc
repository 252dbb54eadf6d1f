// tools/mock_backend_main.cc

// Copyright 2026  The nerkit Authors

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

// The mock labeling backend as an external process speaking the wire
// protocol: request records on stdin, response records on stdout.
//
//   nerkit_mock_backend --refs refs.tsv --noise 0.1 --seed 3 transcribe

#include <iostream>

#include "CLI11.hpp"
#include "tool_util.h"

int main(int argc, char** argv) {
  using namespace nerkit;
  using namespace nerkit::tools;

  CLI::App app{"mock labeling backend (NDJSON on stdin/stdout)"};
  MockFlags flags;
  std::string tagmap_path, capability;
  int die_after = -1;
  app.add_option("--refs", flags.refs, "hidden references");
  app.add_option("--gazetteer", flags.gazetteer, "phrase<TAB>TAG list");
  app.add_option("--noise", flags.noise, "total word error rate");
  app.add_option("--fail", flags.fail, "per-record failure rate");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--tagmap", tagmap_path, "tag map config");
  app.add_option("--die-after", die_after,
                 "write this many records, then exit with status 3");
  app.add_option("capability", capability, "transcribe | tag_text | e2e_ner")
      ->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    auto cap = ParseCapability(capability);
    if (!cap) throw Error(ErrorKind::kUsage, "unknown capability " + capability);
    TagMap tagmap = LoadTagMap(ConfigPath(tagmap_path, "tagmap.tsv"));
    MockBackend backend(BuildMockOptions(flags, tagmap));
    auto requests = DecodeRequests(ReadFileOrStdin("-"));
    auto responses = backend.Invoke(*cap, requests);
    if (die_after >= 0 && static_cast<size_t>(die_after) < responses.size()) {
      responses.resize(die_after);
      // A torn final line, as from a crash mid-write.
      std::cout << EncodeResponses(responses) << "{\"id\":\"trunc";
      std::cout.flush();
      return 3;
    }
    std::cout << EncodeResponses(responses);
  } catch (const Error& e) {
    std::cerr << "nerkit_mock_backend: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  }
  return 0;
}
