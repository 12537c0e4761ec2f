// Writes the bundled synthetic corpus (a small linearly separable multi-label
// set with train and test files) into the directory given as argv[1].
// The generator is deterministic, so the committed files can always be
// reproduced bit-for-bit.

#include <filesystem>
#include <iostream>

#include "synth.hpp"

using namespace polar;
using namespace polar::testing;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: polar_gen_fixtures <out-dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);

  SeparableSpec train_spec;
  train_spec.rows = 200;
  train_spec.seed = 20260901;
  save_dataset(separable_corpus(train_spec), dir / "train.jsonl", FileFormat::jsonl);

  SeparableSpec test_spec = train_spec;
  test_spec.rows = 60;
  test_spec.seed = 20260902;
  test_spec.id_offset = 1000;
  save_dataset(separable_corpus(test_spec), dir / "test.jsonl", FileFormat::jsonl);

  std::cout << "wrote train.jsonl (200 rows) and test.jsonl (60 rows) to " << dir << "\n";
  return 0;
}
