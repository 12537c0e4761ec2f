#include <doctest.h>

#include <fstream>
#include <sstream>

#include "polar/corpus.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace polar;
using namespace polar::testing;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kDetectCsv =
    "ID,Text,Polarization\n"
    "eng_9739af21,Is detecting imperialism in the dnd chat.,0\n"
    "eng_891d3c4a,Start by not listening to msnbc.,1\n";

const std::string kTypeCsv =
    "id,text,Political,Racial/Ethnic,Religious,Gender/Sexual,Other\n"
    "eng_9739af21,Is detecting imperialism in the dnd chat.,0,0,0,0,0\n"
    "eng_891d3c4a,Start by not listening to msnbc.,1,0,0,0,1\n";

const std::string kManifestCsv =
    "id,text,Stereotype,Vilification,Dehumanization,Extreme_Language,Lack_of_Empathy,"
    "Invalidation\n"
    "eng_9739af21,Is detecting imperialism in the dnd chat.,0,0,0,0,0,0\n"
    "eng_891d3c4a,Start by not listening to msnbc.,1,0,0,0,1,0\n";

}  // namespace

TEST_CASE("canonical label lists") {
  CHECK(labels_of(Subtask::detect).size() == 1);
  CHECK(labels_of(Subtask::type).size() == 5);
  CHECK(labels_of(Subtask::manifest).size() == 6);
  CHECK(labels_of(Subtask::detect)[0] == "Polarization");
  CHECK(labels_of(Subtask::type)[0] == "Political");
  CHECK(labels_of(Subtask::type)[4] == "Other");
  CHECK(labels_of(Subtask::manifest)[0] == "Stereotype");
  CHECK(labels_of(Subtask::manifest)[5] == "Invalidation");

  CHECK(all_langs().size() == 22);
  for (Lang lang : {Lang::ita, Lang::pol, Lang::rus, Lang::mya}) {
    CHECK(!language_allowed(Subtask::manifest, lang));
    CHECK(language_allowed(Subtask::type, lang));
    CHECK(language_allowed(Subtask::detect, lang));
  }
  CHECK(language_allowed(Subtask::manifest, Lang::eng));
}

TEST_CASE("load detect csv with gold") {
  TempDir dir("load_detect");
  write_file(dir.file("s1.csv"), kDetectCsv);
  Dataset d = load_dataset(dir.file("s1.csv"), Subtask::detect, FileFormat::csv);
  REQUIRE(d.posts.size() == 2);
  CHECK(d.dropped_rows == 0);
  CHECK(d.posts[0].id == "eng_9739af21");
  CHECK(d.posts[0].lang == Lang::eng);
  CHECK(d.posts[1].text == "Start by not listening to msnbc.");
  REQUIRE(d.gold.has_value());
  CHECK(d.gold->at(0, 0) == 0);
  CHECK(d.gold->at(1, 0) == 1);
}

TEST_CASE("load type csv matches printed label rows") {
  TempDir dir("load_type");
  write_file(dir.file("s2.csv"), kTypeCsv);
  Dataset d = load_dataset(dir.file("s2.csv"), Subtask::type, FileFormat::csv);
  REQUIRE(d.gold.has_value());
  const std::vector<std::uint8_t> row1(d.gold->row(1).begin(), d.gold->row(1).end());
  CHECK(row1 == std::vector<std::uint8_t>{1, 0, 0, 0, 1});
}

TEST_CASE("label columns map to canonical order regardless of file order") {
  TempDir dir("col_order");
  write_file(dir.file("s2.csv"),
             "Other,text,Political,id,Gender/Sexual,Religious,Racial/Ethnic\n"
             "1,Start by not listening to msnbc.,1,eng_891d3c4a,0,0,0\n");
  Dataset d = load_dataset(dir.file("s2.csv"), Subtask::type, FileFormat::csv);
  const std::vector<std::uint8_t> row0(d.gold->row(0).begin(), d.gold->row(0).end());
  CHECK(row0 == std::vector<std::uint8_t>{1, 0, 0, 0, 1});
}

TEST_CASE("empty-text rows are dropped and counted") {
  TempDir dir("drop");
  write_file(dir.file("s1.csv"),
             "id,text,Polarization\n"
             "eng_00000001,hello world,1\n"
             "eng_00000002,,0\n"
             "eng_00000003,\"   \",0\n"
             "eng_00000004,bye,0\n");
  Dataset d = load_dataset(dir.file("s1.csv"), Subtask::detect, FileFormat::csv);
  CHECK(d.posts.size() == 2);
  CHECK(d.dropped_rows == 2);
  CHECK(d.posts.size() + d.dropped_rows == 4);  // retained + dropped = raw
}

TEST_CASE("unlabeled (--) rows load without gold") {
  TempDir dir("unlabeled");
  write_file(dir.file("s1.csv"),
             "id,text,Polarization\n"
             "eng_00000001,first,--\n"
             "eng_00000002,second,--\n");
  Dataset d = load_dataset(dir.file("s1.csv"), Subtask::detect, FileFormat::csv, Partition::test);
  CHECK(d.posts.size() == 2);
  CHECK(!d.gold.has_value());
}

TEST_CASE("loader error cases") {
  TempDir dir("errors");

  SUBCASE("missing label column is named in the error") {
    write_file(dir.file("f.csv"), "id,text,Political\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::type, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::missing_column);
      CHECK(std::string(e.what()).find("Racial/Ethnic") != std::string::npos);
    }
  }
  SUBCASE("missing text column") {
    write_file(dir.file("f.csv"), "id,Polarization\na_1,1\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::missing_column);
    }
  }
  SUBCASE("malformed label cell") {
    write_file(dir.file("f.csv"), "id,text,Polarization\neng_00000001,hi,2\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::malformed_label);
    }
  }
  SUBCASE("duplicate id") {
    write_file(dir.file("f.csv"),
               "id,text,Polarization\neng_00000001,hi,1\neng_00000001,again,0\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::duplicate_id);
    }
  }
  SUBCASE("unknown language prefix") {
    write_file(dir.file("f.csv"), "id,text,Polarization\nxxx_00000001,hi,1\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::unknown_language);
    }
  }
  SUBCASE("lang column contradicting the id prefix") {
    write_file(dir.file("f.csv"), "id,lang,text,Polarization\neng_00000001,deu,hi,1\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::lang_id_mismatch);
    }
  }
  SUBCASE("excluded language for the manifestation subtask") {
    write_file(dir.file("f.csv"),
               "id,text,Stereotype,Vilification,Dehumanization,Extreme_Language,"
               "Lack_of_Empathy,Invalidation\n"
               "ita_00000001,ciao,0,0,0,0,0,0\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::manifest, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::excluded_language);
    }
  }
  SUBCASE("mixed labeled and unlabeled rows") {
    write_file(dir.file("f.csv"),
               "id,text,Polarization\neng_00000001,hi,1\neng_00000002,yo,--\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::inconsistent_gold);
    }
  }
  SUBCASE("unknown column") {
    write_file(dir.file("f.csv"), "id,text,Polarization,bogus\neng_00000001,hi,1,x\n");
    try {
      load_dataset(dir.file("f.csv"), Subtask::detect, FileFormat::csv);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::unknown_column);
    }
  }
}

TEST_CASE("text is NFC-normalized at load, emojis kept byte-exact") {
  TempDir dir("nfc");
  // "e" + combining acute, plus an emoji and a CSV-hostile comma
  const std::string decomposed = "caf\x65\xcc\x81 rocks \xf0\x9f\x94\xa5, indeed";
  const std::string composed = "caf\xc3\xa9 rocks \xf0\x9f\x94\xa5, indeed";
  std::ofstream out(dir.file("f.jsonl"), std::ios::binary);
  out << R"({"id":"eng_00000001","text":")" << "caf\x65\xcc\x81 rocks \\ud83d\\udd25, indeed"
      << R"(","Polarization":1})" << "\n";
  out.close();
  Dataset d = load_dataset(dir.file("f.jsonl"), Subtask::detect, FileFormat::jsonl);
  REQUIRE(d.posts.size() == 1);
  CHECK(d.posts[0].text == composed);
  CHECK(d.posts[0].text != decomposed);
}

TEST_CASE("save/load round trip preserves ids, texts and labels") {
  TempDir dir("roundtrip");
  Dataset d;
  d.subtask = Subtask::type;
  d.posts = {
      {"eng_00000001", Lang::eng, "plain text"},
      {"deu_00000002", Lang::deu, "comma, \"quotes\" and\nnewline"},
      {"zho_00000003", Lang::zho, "emoji \xf0\x9f\x98\x80 and \xe4\xb8\xad\xe6\x96\x87"},
  };
  d.gold = LabelMatrix(Subtask::type, {"eng_00000001", "deu_00000002", "zho_00000003"},
                       {1, 0, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1});

  for (FileFormat fmt : {FileFormat::csv, FileFormat::jsonl}) {
    CAPTURE(to_string(fmt));
    const auto path = dir.file(std::string("d.") + std::string(to_string(fmt)));
    save_dataset(d, path, fmt);
    Dataset back = load_dataset(path, Subtask::type, fmt);
    REQUIRE(back.posts.size() == d.posts.size());
    for (std::size_t i = 0; i < d.posts.size(); ++i) {
      CHECK(back.posts[i].id == d.posts[i].id);
      CHECK(back.posts[i].text == d.posts[i].text);  // byte-exact
      CHECK(back.posts[i].lang == d.posts[i].lang);
    }
    REQUIRE(back.gold.has_value());
    for (std::size_t r = 0; r < d.gold->rows(); ++r) {
      for (std::size_t c = 0; c < d.gold->cols(); ++c) {
        CHECK(back.gold->at(r, c) == d.gold->at(r, c));
      }
    }
    // serialize(load(x)) is a fixpoint
    const auto path2 = dir.file(std::string("d2.") + std::string(to_string(fmt)));
    save_dataset(back, path2, fmt);
    CHECK(read_file(path) == read_file(path2));
  }
}

TEST_CASE("label file round trip (official output schema)") {
  TempDir dir("labels");
  Rng rng(3);
  LabelMatrix m = random_labels(Subtask::manifest, 20, rng, 0.3);
  for (FileFormat fmt : {FileFormat::csv, FileFormat::jsonl}) {
    const auto path = dir.file(std::string("pred.") + std::string(to_string(fmt)));
    save_labels(m, path, fmt);
    LabelMatrix back = load_labels(path, Subtask::manifest, fmt);
    REQUIRE(back.rows() == m.rows());
    CHECK(back.ids() == m.ids());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        CHECK(back.at(r, c) == m.at(r, c));
      }
    }
  }
}

TEST_CASE("load_labels_flexible accepts both schemas") {
  TempDir dir("flex");
  write_file(dir.file("full.csv"), kTypeCsv);
  write_file(dir.file("bare.csv"),
             "id,Political,Racial/Ethnic,Religious,Gender/Sexual,Other\n"
             "eng_891d3c4a,1,0,0,0,1\n");
  LabelMatrix a = load_labels_flexible(dir.file("full.csv"), Subtask::type, FileFormat::csv);
  LabelMatrix b = load_labels_flexible(dir.file("bare.csv"), Subtask::type, FileFormat::csv);
  CHECK(a.rows() == 2);
  CHECK(b.rows() == 1);
  CHECK(a.at(1, 0) == 1);
  CHECK(b.at(0, 4) == 1);
}

TEST_CASE("dataset_stats counts and rates") {
  SUBCASE("4-row toy set, positives {1,1,0,0} -> rate 0.5") {
    Dataset d;
    d.subtask = Subtask::detect;
    for (int i = 0; i < 4; ++i) {
      d.posts.push_back({make_id(Lang::eng, static_cast<std::uint64_t>(i)), Lang::eng, "t"});
    }
    d.gold = LabelMatrix(Subtask::detect,
                         {make_id(Lang::eng, 0), make_id(Lang::eng, 1), make_id(Lang::eng, 2),
                          make_id(Lang::eng, 3)},
                         {1, 1, 0, 0});
    StatsReport s = dataset_stats(d);
    CHECK(s.total_rows == 4);
    CHECK(s.positives_per_language.at(Lang::eng)[0] == 2);
    CHECK(s.rates_per_language.at(Lang::eng)[0] == doctest::Approx(0.5));
    CHECK(s.rate_summary[0].min == doctest::Approx(0.5));
    CHECK(s.rate_summary[0].max == doctest::Approx(0.5));
  }

  SUBCASE("all labels 1 -> every rate 1.0") {
    Rng rng(1);
    Dataset d;
    d.subtask = Subtask::type;
    std::vector<std::string> ids;
    std::vector<std::uint8_t> values;
    for (int i = 0; i < 10; ++i) {
      auto id = make_id(i % 2 ? Lang::eng : Lang::deu, static_cast<std::uint64_t>(i));
      d.posts.push_back({id, i % 2 ? Lang::eng : Lang::deu, "t"});
      ids.push_back(id);
      for (int l = 0; l < 5; ++l) values.push_back(1);
    }
    d.gold = LabelMatrix(Subtask::type, std::move(ids), std::move(values));
    StatsReport s = dataset_stats(d);
    for (const auto& summary : s.rate_summary) {
      CHECK(summary.min == doctest::Approx(1.0));
      CHECK(summary.median == doctest::Approx(1.0));
      CHECK(summary.max == doctest::Approx(1.0));
    }
  }

  SUBCASE("positive counts equal brute-force column sums") {
    Rng rng(99);
    Dataset d;
    d.subtask = Subtask::manifest;
    std::vector<std::string> ids;
    std::vector<std::uint8_t> values;
    const Lang langs[] = {Lang::eng, Lang::deu, Lang::amh};
    for (int i = 0; i < 60; ++i) {
      Lang lang = langs[i % 3];
      auto id = make_id(lang, static_cast<std::uint64_t>(i));
      d.posts.push_back({id, lang, "t"});
      ids.push_back(id);
      for (int l = 0; l < 6; ++l) values.push_back(bounded(rng, 2) ? 1 : 0);
    }
    d.gold = LabelMatrix(Subtask::manifest, std::move(ids), std::move(values));
    StatsReport s = dataset_stats(d);
    for (std::size_t l = 0; l < 6; ++l) {
      std::size_t brute = 0;
      for (std::size_t r = 0; r < d.gold->rows(); ++r) {
        brute += d.gold->at(r, l);
      }
      CHECK(s.total_positives[l] == brute);
    }
  }

  SUBCASE("no gold -> error") {
    Dataset d;
    d.subtask = Subtask::detect;
    d.posts.push_back({"eng_00000001", Lang::eng, "t"});
    CHECK_THROWS_AS(dataset_stats(d), Error);
  }
}

TEST_CASE("official reference counts table") {
  const auto& table = official_dataset_counts();
  REQUIRE(table.size() == 22);
  std::size_t train = 0, dev = 0, test = 0, total = 0;
  for (const auto& [lang, c] : table) {
    train += c.train;
    dev += c.dev;
    test += c.test;
    total += c.total();
  }
  CHECK(train == 67736);
  CHECK(dev == 3744);
  CHECK(test == 33782);
  CHECK(total == 105262);
  CHECK(table.at(Lang::amh).train == 3332);
  CHECK(table.at(Lang::amh).dev == 166);
  // merged train+dev for amh
  CHECK(table.at(Lang::amh).train + table.at(Lang::amh).dev == 3498);
}

TEST_CASE("validate_against_reference") {
  Dataset d;
  d.subtask = Subtask::detect;
  d.partition = Partition::train;
  for (std::uint64_t i = 0; i < 3332; ++i) {
    d.posts.push_back({make_id(Lang::amh, i), Lang::amh, "t"});
  }

  SUBCASE("matching counts -> empty") {
    std::map<Lang, std::size_t> expected = {{Lang::amh, 3332}};
    CHECK(validate_against_reference(d, expected).empty());
  }
  SUBCASE("off-by-one -> one mismatch record") {
    d.posts.pop_back();
    std::map<Lang, std::size_t> expected = {{Lang::amh, 3332}};
    auto mismatches = validate_against_reference(d, expected);
    REQUIRE(mismatches.size() == 1);
    CHECK(mismatches[0].lang == Lang::amh);
    CHECK(mismatches[0].expected == 3332);
    CHECK(mismatches[0].actual == 3331);
  }
  SUBCASE("full official train table accepts matching per-language counts") {
    Dataset full;
    full.subtask = Subtask::detect;
    for (const auto& [lang, counts] : official_dataset_counts()) {
      for (std::uint64_t i = 0; i < counts.train; ++i) {
        full.posts.push_back({make_id(lang, i), lang, "t"});
      }
    }
    CHECK(full.posts.size() == 67736);
    CHECK(validate_against_reference(full, official_counts_for(Partition::train)).empty());
  }
}
