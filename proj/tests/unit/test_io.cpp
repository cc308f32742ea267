#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "likertlv/errors.hpp"
#include "likertlv/io.hpp"

using namespace likertlv;

TEST_CASE("CSV round trip") {
  const SimulatedData s = simulate(fixture::five_item_truth(), fixture::five_item_cuts(), 30, 2, 1);
  std::ostringstream out;
  write_likert_csv(out, s.observed);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 30 * 5 * 2);
  std::istringstream in(text);
  const LikertDataset back = read_likert_csv(in, 5);
  CHECK(back.responses == s.observed.responses);
  CHECK(back.items == 5);
  CHECK(back.times == 2);
  CHECK(back.num_categories == 5);
}

TEST_CASE("CSV reader tolerates row order and CRLF") {
  std::istringstream in(
      "subject,item,time,response\r\n"
      "2,2,2,3\r\n1,1,1,1\r\n1,2,1,2\r\n1,1,2,2\r\n1,2,2,3\r\n2,1,1,1\r\n2,2,1,1\r\n2,1,2,2\r\n");
  const LikertDataset d = read_likert_csv(in);
  CHECK(d.num_categories == 3);
  CHECK(d.at(0, 1, 0) == 2);
  CHECK(d.at(1, 1, 1) == 3);
}

TEST_CASE("CSV reader rejects malformed input") {
  auto read = [](const std::string& text, std::optional<int> k = std::nullopt) {
    std::istringstream in(text);
    return read_likert_csv(in, k);
  };
  CHECK_THROWS_AS(read(""), InputError);
  CHECK_THROWS_AS(read("subject,item,response\n1,1,1\n"), InputError);
  CHECK_THROWS_AS(read("subject,item,time,response\n1,1,1\n"), InputError);
  CHECK_THROWS_AS(read("subject,item,time,response\n1,1,1,x\n"), InputError);
  CHECK_THROWS_AS(read("subject,item,time,response\n0,1,1,1\n"), InputError);
  CHECK_THROWS_AS(read("subject,item,time,response\n1,1,1,6\n1,2,1,1\n1,1,2,1\n1,2,2,1\n", 5), InputError);
  CHECK_THROWS_AS(read("subject,item,time,response\n1,1,1,1\n1,1,1,2\n1,2,1,1\n1,1,2,1\n1,2,2,1\n"), InputError);
  try {
    read("subject,item,time,response\n1,1,1,1\n1,2,1,2\n1,1,2,1\n2,1,1,1\n2,2,1,2\n2,1,2,1\n2,2,2,2\n");
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("missing") != std::string::npos);
    CHECK(what.find("(1,2,2)") != std::string::npos);
  }
}

TEST_CASE("model JSON round trip") {
  const auto truth = fixture::five_item_truth();
  const auto cuts = fixture::five_item_cuts();
  const nlohmann::json doc = model_to_json(truth, cuts);
  CHECK(doc.at("num_categories") == 5);
  const nlohmann::json reparsed = nlohmann::json::parse(doc.dump());
  CHECK(params_from_json(reparsed).sigma == truth.sigma);
  CHECK(params_from_json(reparsed).tau == truth.tau);
  CHECK(cuts_from_json(reparsed).cuts == cuts.cuts);

  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"sigma", {0.5, 0.5}}}), InputError);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"sigma", {0.5, "a"}}, {"tau", {0.1, 0.1}}}), InputError);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"sigma", {0.9, 0.5}}, {"tau", {0.9, 0.1}}}), InputError);
  CHECK_THROWS_AS(cuts_from_json(nlohmann::json{{"cuts", {{0.0, 1.0}, {0.5}}}}), InputError);
  CHECK_THROWS_AS(cuts_from_json(nlohmann::json{{"cuts", {{1.0, 0.0}}}}), InputError);
}

TEST_CASE("squared-scale reporting keeps the sign of tau") {
  FitResult fit;
  fit.params = {Eigen::Vector2d(0.5, 0.6), Eigen::Vector2d(0.3, -0.4)};
  fit.gamma_sq = fit.params.gamma_sq();
  fit.objective = 0.25;
  fit.converged = true;
  const nlohmann::json doc = fit_to_json(fit);
  CHECK(doc.at("sigma_sq")[1].get<double>() == doctest::Approx(0.36));
  CHECK(doc.at("tau_sq_signed")[0].get<double>() == doctest::Approx(0.09));
  CHECK(doc.at("tau_sq_signed")[1].get<double>() == doctest::Approx(-0.16));
  CHECK(doc.at("gamma_sq")[1].get<double>() == doctest::Approx(0.48));
  CHECK(doc.at("objective") == 0.25);
  CHECK(doc.at("method") == "cr");
}

TEST_CASE("trace CSV round trip") {
  StemChain chain;
  chain.sigma_trace = RowMatrixXd(3, 2);
  chain.tau_trace = RowMatrixXd(3, 2);
  chain.cut_trace = RowMatrixXd(3, 4);
  chain.sigma_trace << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  chain.tau_trace << -0.1, 0.0, 0.1, 1.0 / 3.0, 0.2, 0.3;
  chain.cut_trace.setRandom();
  std::stringstream io;
  write_trace_csv(io, chain);
  const TraceSeries series = read_trace_csv(io);
  REQUIRE(series.size() == 8);
  CHECK(series[0].first == "sigma_1");
  CHECK(series[3].first == "tau_2");
  CHECK(series[7].first == "z_2_2");
  CHECK(series[3].second == std::vector<double>{0.0, 1.0 / 3.0, 0.3});
  CHECK(series[7].second[2] == chain.cut_trace(2, 3));

  std::istringstream bad("iteration,parameter,value\n1,sigma_1,abc\n");
  CHECK_THROWS_AS(read_trace_csv(bad), InputError);
  std::istringstream header("it,param,value\n");
  CHECK_THROWS_AS(read_trace_csv(header), InputError);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
