// Regenerates the bundled fixture corpora under the given directory.
#include <filesystem>
#include <iostream>

#include "support/reference_fixtures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: write_fixtures DIR\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir / "big_data");
  communitylens::write_text_file(dir / "big_data" / "publications.jsonl", fixtures::to_jsonl(fixtures::big_data_fixture()));
  std::filesystem::create_directories(dir / "age");
  communitylens::write_text_file(dir / "age" / "publications.jsonl", fixtures::to_jsonl(fixtures::age_fixture()));
  std::filesystem::create_directories(dir / "thresholds");
  communitylens::write_text_file(dir / "thresholds" / "publications.jsonl",
                                 fixtures::to_jsonl(fixtures::threshold_fixture().pubs));
  return 0;
}
