//! Stack-tree encoding of words: the finite tree of a well-matched word,
//! the regular tree of a lasso, its cardinal branch, decoding, and
//! membership in the recognizer of stack trees.
//!
//! cargo run --example stack_trees -- ["u (v)^w"] [depth]

use vldl::alphabet::{PushdownAlphabet, WordSpec};
use vldl::stacktree::{cardinal_branch, decode, encode, encode_lasso, render_text, stack_tree_recognizer, RegularTree};
use vldl::treeauto::contains;

fn main() -> vldl::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = args.first().map(String::as_str).unwrap_or("l c l r c l (l)^w");
    let depth = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let alpha = PushdownAlphabet::crl();

    let tree = match alpha.parse_word_spec(spec)? {
        WordSpec::Finite(w) => RegularTree::from_finite(&encode(&alpha, &w)),
        WordSpec::Lasso(w) => {
            let t = encode_lasso(&alpha, &w)?;
            println!("generator states: {}", t.len());
            let back = decode(&alpha, &t)?;
            println!("decoded: {}", alpha.fmt_lasso(&back));
            t
        }
    };
    print!("{}", render_text(&alpha, &tree, depth)?);

    let positions: Vec<usize> = cardinal_branch(&alpha, &tree, depth)?.into_iter().map(|(_, k)| k).collect();
    println!("cardinal positions: {positions:?}");

    let ts = stack_tree_recognizer(&alpha);
    println!("recognizer states: {}, accepts: {}", ts.len(), contains(&ts, &tree)?);
    Ok(())
}
