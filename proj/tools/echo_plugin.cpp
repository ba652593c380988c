// Reference plugin for the out-of-process backend protocol: one JSON request
// per stdin line, one JSON response per stdout line. The default mode echoes
// its input back as the generated text with exact one-hot probability rows.
// --mode bad-rows and --mode bad-count deliberately violate the probability
// invariants so conformance checks have something to catch.

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      if (!token.empty()) out.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

json handle_generate(const json& payload, const std::string& mode) {
  const std::string text = payload.value("rendered", "");
  const auto tokens = split_ws(text);

  std::set<std::string> unique(tokens.begin(), tokens.end());
  std::vector<std::string> vocab(unique.begin(), unique.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index[vocab[i]] = i;

  std::vector<std::vector<double>> rows;
  for (const auto& token : tokens) {
    std::vector<double> row(vocab.size(), 0.0);
    row[index[token]] = mode == "bad-rows" ? 0.7 : 1.0;
    rows.push_back(std::move(row));
  }
  if (mode == "bad-count" && !rows.empty()) rows.pop_back();

  return json{{"text", text}, {"vocab", vocab}, {"rows", rows}};
}

}  // namespace

int main(int argc, char** argv) {
  std::string mode = "echo";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--mode") mode = argv[i + 1];
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json reply;
    try {
      const json request = json::parse(line);
      const std::string op = request.at("op").get<std::string>();
      const json payload = request.value("payload", json::object());

      if (op == "generate") {
        reply = json{{"ok", true}, {"result", handle_generate(payload, mode)}};
      } else if (op == "extract") {
        reply = json{{"ok", true},
                     {"result", json{{"answered", payload.value("prompt", "")}}}};
      } else if (op == "score") {
        reply = json{{"ok", true}, {"result", json{{"p", 0.5}}}};
      } else if (op == "token_prob") {
        reply = json{{"ok", true}, {"result", json{{"p", 0.5}}}};
      } else if (op == "vocab") {
        reply = json{{"ok", true},
                     {"result", json{{"vocab", json::array()}}}};
      } else if (op == "train") {
        reply = json{{"ok", true}, {"result", json{{"loss", 0.0}}}};
      } else if (op == "save" || op == "load") {
        reply = json{{"ok", true}, {"result", json::object()}};
      } else {
        reply = json{{"ok", false}, {"error", "unknown op '" + op + "'"}};
      }
    } catch (const std::exception& e) {
      reply = json{{"ok", false}, {"error", e.what()}};
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
