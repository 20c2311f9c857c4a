//! The symptom lexicon and query matching. A record counts toward a symptom
//! when the query contains the symptom's name or any alias as a
//! case-insensitive substring; a multi-symptom query counts once per matched
//! symptom.

/// The built-in 44-term symptom list. Pyrexia carries the everyday alias
/// "fever"; every other term matches by its own name.
const DEFAULT_TERMS: [&str; 44] = [
    "Abdominal pain",
    "Ageusia",
    "Anosmia",
    "Anxiety",
    "Arthralgia",
    "Body ache",
    "Chest pain",
    "Chest tightness",
    "Chills",
    "Confusion",
    "Cough",
    "Dehydration",
    "Diarrhea",
    "Disorientation",
    "Dizziness",
    "Dyspnea",
    "Ear infection",
    "Ear pain",
    "Eye infection",
    "Eye pain",
    "Fatigue",
    "Headache",
    "Hot flush",
    "Hyperhidrosis",
    "Insomnia",
    "Lethargic",
    "Loss of appetite",
    "Mental health symptoms",
    "Migraine",
    "Nasal dryness",
    "Nausea",
    "Oropharyngeal pain",
    "Pain",
    "Palpitation",
    "Pyrexia",
    "Rash",
    "Rhinorrhea",
    "Sinusitis",
    "Sleep disturbance",
    "Sneezing",
    "Stress",
    "Sweating",
    "URTI",
    "Vomiting",
];

#[derive(Clone, Debug)]
pub struct Symptom {
    pub name: String,
    pub aliases: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SymptomLexicon {
    entries: Vec<Symptom>,
    /// Lowercased match tokens per entry (name first, then aliases).
    tokens: Vec<Vec<String>>,
}

impl SymptomLexicon {
    pub fn new(entries: Vec<Symptom>) -> Self {
        let tokens = entries
            .iter()
            .map(|s| {
                std::iter::once(s.name.to_lowercase())
                    .chain(s.aliases.iter().map(|a| a.to_lowercase()))
                    .collect()
            })
            .collect();
        Self { entries, tokens }
    }

    pub fn default_44() -> Self {
        let entries = DEFAULT_TERMS
            .iter()
            .map(|&name| Symptom {
                name: name.to_string(),
                aliases: if name == "Pyrexia" { vec!["fever".to_string()] } else { Vec::new() },
            })
            .collect();
        Self::new(entries)
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Self {
        let entries = names
            .iter()
            .map(|n| Symptom { name: n.as_ref().to_string(), aliases: Vec::new() })
            .collect();
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|s| s.name.clone()).collect()
    }

    pub fn entries(&self) -> &[Symptom] {
        &self.entries
    }

    /// Indices of every symptom the query matches.
    pub fn matches(&self, query: &str) -> Vec<usize> {
        let lower = query.to_lowercase();
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, tokens)| tokens.iter().any(|t| lower.contains(t.as_str())))
            .map(|(idx, _)| idx)
            .collect()
    }

    /// For each entry, the symptoms a query consisting of exactly that
    /// entry's name would match. Needed by generators that must predict what
    /// a matcher-based count will see (names can be substrings of each
    /// other, e.g. "Pain" inside "Chest pain").
    pub fn cross_matches(&self) -> Vec<Vec<usize>> {
        self.entries.iter().map(|s| self.matches(&s.name)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_has_44_terms() {
        let lex = SymptomLexicon::default_44();
        assert_eq!(lex.len(), 44);
        assert_eq!(lex.names()[10], "Cough");
        assert_eq!(lex.names()[43], "Vomiting");
    }

    #[test]
    fn substring_match_is_case_insensitive() {
        let lex = SymptomLexicon::default_44();
        let cough = lex.names().iter().position(|n| n == "Cough").unwrap();
        assert_eq!(lex.matches("bad COUGH tonight"), vec![cough]);
        assert!(lex.matches("weather tomorrow").is_empty());
    }

    #[test]
    fn alias_and_multi_symptom_queries() {
        let lex = SymptomLexicon::default_44();
        let names = lex.names();
        let cough = names.iter().position(|n| n == "Cough").unwrap();
        let pyrexia = names.iter().position(|n| n == "Pyrexia").unwrap();
        let hits = lex.matches("fever and cough");
        assert_eq!(hits, vec![cough, pyrexia]);
    }

    #[test]
    fn cross_matches_capture_substring_terms() {
        let lex = SymptomLexicon::default_44();
        let names = lex.names();
        let chest_pain = names.iter().position(|n| n == "Chest pain").unwrap();
        let pain = names.iter().position(|n| n == "Pain").unwrap();
        let cross = lex.cross_matches();
        assert!(cross[chest_pain].contains(&chest_pain));
        assert!(cross[chest_pain].contains(&pain));
        assert_eq!(cross[pain], vec![pain]);
    }
}
