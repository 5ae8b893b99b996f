// Writes the JSON mirror of a registry CSV: registry-mirror <in.csv> <out.json>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "compass/registry.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: registry-mirror <sources.csv> <sources.json>\n";
    return 1;
  }
  try {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : compass::load_registry(argv[1])) {
      rows.push_back({{"id", s.id},
                      {"country", s.country},
                      {"name", s.name},
                      {"homepage_url", s.homepage_url},
                      {"positioning", compass::label_name(s.positioning)},
                      {"source_note", s.source_note}});
    }
    std::ofstream out(argv[2], std::ios::binary | std::ios::trunc);
    out << rows.dump(2) << '\n';
    return out ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
}
