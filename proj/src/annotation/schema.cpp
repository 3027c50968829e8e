#include "polemos/annotation/schema.hpp"

namespace polemos {

const std::array<LabelInfo, kNumLabels>& label_schema() {
  // Rubrics are shown verbatim to annotators. Inclusion follows the explicit
  // wording of the comment, not inferred intent.
  static const std::array<LabelInfo, kNumLabels> schema{{
      {0, "ANTI_HAMAS", "Anti-Hamás",
       "Critica u hostiliza a Hamás, nombrándolo. Cuenta también llamarlo terrorista o "
       "responsabilizarlo de la guerra."},
      {1, "ANTI_ISRAEL", "Anti-Israel",
       "Critica u hostiliza al Estado de Israel, su gobierno, su ejército o sus líderes, "
       "nombrándolos. Cuentan las acusaciones de crímenes."},
      {2, "ANTI_PALESTINO", "Anti-Palestino",
       "Hostiliza a la población palestina o a la gente de Gaza en general, no solo a Hamás: "
       "la responsabiliza, la insulta o ataca su religión."},
      {3, "SIN_POSTURA", "Sin Postura",
       "Habla de la guerra sin favorecer a ningún actor, o reparte la crítica entre ambos. "
       "Incluye llamados genéricos a la paz."},
      {4, "NO_RELACIONADO", "No Relacionado",
       "No toca la controversia: saludos, opiniones sobre el canal o el presentador, otras "
       "noticias."},
      {5, "PRO_ISRAEL", "Pro-Israel",
       "Respalda a Israel o a su población, nombrándolos: apoyo a su ofensiva, a su derecho a "
       "responder o solidaridad con víctimas israelíes."},
      {6, "PRO_PALESTINO", "Pro-Palestino",
       "Respalda a la población palestina, nombrándola: consignas de apoyo, solidaridad con Gaza "
       "o denuncia de su sufrimiento."},
  }};
  return schema;
}

std::optional<int> code_from_name(std::string_view name) {
  for (const LabelInfo& l : label_schema())
    if (l.name == name) return l.code;
  return std::nullopt;
}

std::string_view label_name(int code) {
  if (!is_valid_code(code)) return "INVALID";
  return label_schema()[static_cast<std::size_t>(code)].name;
}

}  // namespace polemos
