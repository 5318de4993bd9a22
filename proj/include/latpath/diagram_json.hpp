#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "latpath/inference.hpp"
#include "latpath/persistence.hpp"

namespace latpath {

// Provenance is a flat ordered map rendered as a JSON object. Values are
// rendered as JSON strings except when tagged numeric.
struct Provenance {
    std::map<std::string, std::string> text;
    std::map<std::string, double> numbers;
};

// {"dim": k, "max_eps": e|null, "dropped_infinite": m, "pairs": [[b,d],...]}
// Pairs are written sorted by (birth, death); doubles carry 17 significant
// digits so they round-trip exactly. An infinite max_eps serializes as null.
void write_diagram_json(std::ostream& out, const PersistenceDiagram& diagram,
                        const Provenance* provenance = nullptr);

PersistenceDiagram read_diagram_json(std::istream& in,
                                     const std::string& source_name = "");

PersistenceDiagram read_diagram_file(const std::string& path);

void write_inference_json(std::ostream& out, const InferenceResult& result,
                          const Provenance* provenance = nullptr);

// Serialize a double as a JSON number with 17 significant digits.
std::string json_number(double v);

void write_provenance_json(std::ostream& out, const Provenance& provenance);

}  // namespace latpath
