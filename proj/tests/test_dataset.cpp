#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "tempdir.hpp"
#include "wearfuse/dataset.hpp"
#include "wearfuse/error.hpp"

using namespace wearfuse;

namespace {

ErrorCode code_of_call(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("value CSV round-trips doubles exactly") {
  TempDir dir("dataset");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1e3);
  std::vector<double> v{0.0, -0.0, 1e-300, 5e-324, std::numeric_limits<double>::max(), 0.1, -2.5};
  for (int i = 0; i < 500; ++i) v.push_back(g(rng));
  write_value_csv(dir / "x.csv", v);
  auto back = read_value_csv(dir / "x.csv");
  REQUIRE(back.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
  CHECK(slurp(dir / "x.csv").rfind("value\n0\n", 0) == 0);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-8) == "-2.5e-08");
}

TEST_CASE("ingestion errors name file and line") {
  TempDir dir("dataset");
  spit(dir / "bad.csv", "value\n1.0\n2.0\nabc\n4\n");
  std::string msg;
  CHECK(code_of_call([&] { read_value_csv(dir / "bad.csv"); }, &msg) == ErrorCode::Ingestion);
  CHECK(msg.find("bad.csv:4") != std::string::npos);

  spit(dir / "comma.csv", "value\n1,5\n");
  CHECK(code_of_call([&] { read_value_csv(dir / "comma.csv"); }, &msg) == ErrorCode::Ingestion);
  CHECK(msg.find("comma.csv:2") != std::string::npos);

  spit(dir / "header.csv", "val\n1\n");
  CHECK(code_of_call([&] { read_value_csv(dir / "header.csv"); }, &msg) == ErrorCode::Ingestion);
  CHECK(msg.find("header.csv:1") != std::string::npos);

  spit(dir / "nan.csv", "value\nnan\n");
  CHECK(code_of_call([&] { read_value_csv(dir / "nan.csv"); }) == ErrorCode::Ingestion);

  spit(dir / "blank.csv", "value\n1\n\n2\n");
  CHECK(code_of_call([&] { read_value_csv(dir / "blank.csv"); }, &msg) == ErrorCode::Ingestion);
  CHECK(msg.find("blank.csv:3") != std::string::npos);

  spit(dir / "labels.csv", "label\n1\n2.5\n");
  CHECK(code_of_call([&] { read_label_csv(dir / "labels.csv"); }, &msg) == ErrorCode::Ingestion);
  CHECK(msg.find("labels.csv:3") != std::string::npos);

  CHECK(code_of_call([&] { read_value_csv(dir / "absent.csv"); }) == ErrorCode::Io);
}

TEST_CASE("CRLF files and leading plus signs are accepted") {
  TempDir dir("dataset");
  spit(dir / "x.csv", "value\r\n+1.5\r\n-2\r\n");
  CHECK(read_value_csv(dir / "x.csv") == std::vector<double>{1.5, -2.0});
}

TEST_CASE("subject round-trip and ACC assembly") {
  TempDir dir("dataset");
  SubjectData d;
  d.subject_id = "S07";
  d.labels.labels = {1, 1, 2, 0, 3};
  d.signals[Modality::ECG] = {"S07", Modality::ECG, 700.0, {0.5, -0.25, 1.0}};
  d.signals[Modality::ACC_X] = {"S07", Modality::ACC_X, 32.0, {3.0, 0.0}};
  d.signals[Modality::ACC_Y] = {"S07", Modality::ACC_Y, 32.0, {4.0, 0.0}};
  d.signals[Modality::ACC_Z] = {"S07", Modality::ACC_Z, 32.0, {0.0, 2.0}};
  write_subject(dir / "S07", d);
  spit(dir / "notes.txt", "ignored");

  auto ids = list_subjects(dir.path());
  CHECK(ids == std::vector<std::string>{"S07"});

  const Modality wanted[] = {Modality::ECG, Modality::ACC};
  auto back = read_subject(dir / "S07", wanted);
  CHECK(back.subject_id == "S07");
  CHECK(back.labels.labels == d.labels.labels);
  CHECK(back.signals.at(Modality::ECG).samples == d.signals[Modality::ECG].samples);
  CHECK(back.signals.at(Modality::ECG).fs == 700.0);
  const auto& acc = back.signals.at(Modality::ACC);
  CHECK(acc.fs == 32.0);
  CHECK(acc.samples == std::vector<double>{5.0, 2.0});

  auto meta = read_meta(dir / "S07" / "meta.json");
  CHECK(meta.size() == 4);
}

TEST_CASE("missing modality") {
  TempDir dir("dataset");
  SubjectData d;
  d.subject_id = "S01";
  d.labels.labels = {1};
  d.signals[Modality::ECG] = {"S01", Modality::ECG, 700.0, {1.0}};
  write_subject(dir / "S01", d);
  const Modality eda[] = {Modality::EDA};
  CHECK(code_of_call([&] { read_subject(dir / "S01", eda); }) == ErrorCode::MissingModality);

  // Rate present, file absent.
  spit(dir / "S01" / "meta.json", R"({"ECG": 700, "EDA": 4})");
  CHECK(code_of_call([&] { read_subject(dir / "S01", eda); }) == ErrorCode::MissingModality);

  spit(dir / "S01" / "meta.json", R"({"ECG": -1})");
  const Modality ecg[] = {Modality::ECG};
  CHECK(code_of_call([&] { read_subject(dir / "S01", ecg); }) == ErrorCode::Ingestion);
}

TEST_CASE("list_subjects on a missing directory") {
  CHECK(code_of_call([] { list_subjects("/nonexistent/wearfuse"); }) == ErrorCode::Io);
}
