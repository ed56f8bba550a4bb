use proptest::prelude::*;

use rumour_evidence::parse_ingest::{extract_triples, parse_conllu, retain_by_deprel, QUERY_RELATIONS};

const RELATIONS: &[&str] = &[
    "nsubj", "nsubj:pass", "obj", "iobj", "obl", "obl:npmod", "xcomp", "ccomp", "advcl", "acl", "acl:relcl", "amod",
    "nummod", "compound", "compound:prt", "aux", "aux:pass", "cop", "mark", "case", "det", "punct", "cc", "conj",
    "parataxis", "nmod",
];
const UPOS: &[&str] = &["NOUN", "VERB", "ADJ", "AUX", "PRON", "PROPN", "NUM", "ADP", "PUNCT", "ADV"];

/// Random tree: token order is shuffled, each non-root attaches to an
/// earlier token in that order.
fn tree() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
    (1usize..16).prop_flat_map(|n| {
        (
            Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(any::<prop::sample::Index>(), n),
            proptest::collection::vec(0..RELATIONS.len() * UPOS.len(), n),
        )
            .prop_map(move |(order, picks, labels)| {
                let mut heads = vec![0; n + 1];
                for k in 1..n {
                    heads[order[k]] = order[picks[k].index(k)];
                }
                (heads, order, labels)
            })
    })
}

fn render(heads: &[usize], labels: &[usize], root: usize) -> String {
    let mut out = String::from("# sent_id = r\n");
    for i in 1..heads.len() {
        let rel = if i == root { "root" } else { RELATIONS[labels[i - 1] % RELATIONS.len()] };
        let upos = UPOS[labels[i - 1] / RELATIONS.len()];
        out.push_str(&format!("{i}\tw{i}\tw{i}\t{upos}\t_\t_\t{}\t{rel}\t_\t_\n", heads[i]));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn random_trees_are_accepted((heads, order, labels) in tree()) {
        let text = render(&heads, &labels, order[0]);
        let batch = parse_conllu(&text);
        prop_assert!(batch.errors.is_empty(), "{:?}", batch.errors);
        let s = &batch.sentences["r"];
        prop_assert_eq!(s.len(), heads.len() - 1);
        prop_assert_eq!(s.root().index, order[0]);
        let child_total: usize = (1..=s.len()).map(|i| s.children(i).count()).sum();
        prop_assert_eq!(child_total, s.len() - 1);

        for t in extract_triples(s) {
            prop_assert!(t.is_well_formed(s.len()), "{:?}", t);
        }

        let kept = retain_by_deprel(s, &QUERY_RELATIONS);
        prop_assert!(kept.windows(2).all(|w| w[0].index < w[1].index));
        for t in &kept {
            let direct = QUERY_RELATIONS.contains(&t.deprel.as_str());
            let modifier_head = s.children(t.index).any(|c| {
                ["compound", "amod", "nummod"].contains(&c.deprel.as_str()) && QUERY_RELATIONS.contains(&c.deprel.as_str())
            });
            prop_assert!(direct || modifier_head);
        }
    }

    #[test]
    fn cycles_are_rejected((heads, order, labels) in tree(), pick in any::<prop::sample::Index>()) {
        let n = heads.len() - 1;
        prop_assume!(n >= 3);
        // point a token's head at one of its own descendants, away from the root
        let root = order[0];
        let victims: Vec<usize> = (1..=n).filter(|&i| i != root && heads[i] != root).collect();
        prop_assume!(!victims.is_empty());
        let v = victims[pick.index(victims.len())];
        let mut heads = heads.clone();
        let descendant = (1..=n).find(|&d| {
            let mut at = heads[d];
            while at != 0 {
                if at == v { return true; }
                at = heads[at];
            }
            false
        });
        let target = descendant.unwrap_or(v);
        heads[v] = target;
        let batch = parse_conllu(&render(&heads, &labels, root));
        prop_assert!(batch.sentences.is_empty());
        prop_assert_eq!(batch.errors.len(), 1);
    }

    #[test]
    fn a_second_root_is_rejected((heads, order, labels) in tree()) {
        prop_assume!(heads.len() > 2);
        let mut heads = heads.clone();
        heads[order[1]] = 0;
        let batch = parse_conllu(&render(&heads, &labels, order[0]));
        prop_assert!(batch.sentences.is_empty());
    }

    #[test]
    fn out_of_range_heads_are_rejected((heads, order, labels) in tree(), extra in 1usize..5) {
        prop_assume!(heads.len() > 2);
        let mut heads = heads.clone();
        heads[order[1]] = heads.len() - 1 + extra;
        let batch = parse_conllu(&render(&heads, &labels, order[0]));
        prop_assert!(batch.sentences.is_empty());
    }
}
