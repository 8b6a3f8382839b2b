//! Finite rooted tree-like models, canonical codes and unraveling.

use std::fmt;

use super::{Color, KripkeFrame, KripkeModel};
use crate::error::{Error, Result};
use crate::formula::VarContext;
use crate::morphisms::{is_monotonic, NodeMap};

/// Isomorphism key for colored rooted trees: the root color followed by the
/// sorted codes of the children. Two trees have equal codes iff they are
/// isomorphic as colored trees; the derived `Ord` is a total order on keys,
/// unrelated to the color lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    color: u64,
    children: Vec<CanonicalCode>,
}

impl CanonicalCode {
    pub fn new(color: Color, mut children: Vec<CanonicalCode>) -> Self {
        children.sort();
        CanonicalCode {
            color: color.bits(),
            children,
        }
    }

    pub fn leaf(color: Color) -> Self {
        CanonicalCode::new(color, Vec::new())
    }

    pub fn color_bits(&self) -> u64 {
        self.color
    }

    pub fn color(&self, n: usize) -> Color {
        Color::new(self.color, n)
    }

    pub fn children(&self) -> &[CanonicalCode] {
        &self.children
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(CanonicalCode::size).sum::<usize>()
    }

    /// Number of nodes on a longest root-to-leaf chain.
    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(CanonicalCode::depth)
            .max()
            .unwrap_or(0)
    }

    /// Materializes the tree with node ids `r`, `r/0`, `r/0/1`, ...
    pub fn to_tree(&self, ctx: &VarContext) -> Tree {
        let mut ids = Vec::new();
        let mut parent = Vec::new();
        let mut colors = Vec::new();
        let mut stack = vec![(self, None::<usize>, "r".to_string())];
        while let Some((code, par, id)) = stack.pop() {
            let me = ids.len();
            ids.push(id.clone());
            parent.push(par);
            colors.push(Color::new(code.color, ctx.len()));
            for (i, child) in code.children.iter().enumerate().rev() {
                stack.push((child, Some(me), format!("{id}/{i}")));
            }
        }
        Tree::from_parents(ids, parent, colors, ctx.clone())
            .expect("a canonical code describes a persistent tree")
    }

    pub fn display(&self, n: usize) -> CodeDisplay<'_> {
        CodeDisplay { code: self, n }
    }

    /// Reads the textual form produced by [`CanonicalCode::display`], e.g.
    /// `00[01[11],10]`.
    pub fn parse(text: &str) -> Option<(CanonicalCode, usize)> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let mut width = None;
        let code = parse_code(&chars, &mut pos, &mut width)?;
        (pos == chars.len()).then(|| (code, width.unwrap_or(0)))
    }
}

fn parse_code(chars: &[char], pos: &mut usize, width: &mut Option<usize>) -> Option<CanonicalCode> {
    let start = *pos;
    while *pos < chars.len() && matches!(chars[*pos], '0' | '1') {
        *pos += 1;
    }
    let color: String = chars[start..*pos].iter().collect();
    match *width {
        None => *width = Some(color.len()),
        Some(w) if w != color.len() => return None,
        _ => {}
    }
    let color = Color::parse(&color)?;
    let mut children = Vec::new();
    if chars.get(*pos) == Some(&'[') {
        *pos += 1;
        loop {
            children.push(parse_code(chars, pos, width)?);
            match chars.get(*pos) {
                Some(',') => *pos += 1,
                Some(']') => {
                    *pos += 1;
                    break;
                }
                _ => return None,
            }
        }
    }
    Some(CanonicalCode::new(color, children))
}

pub struct CodeDisplay<'a> {
    code: &'a CanonicalCode,
    n: usize,
}

impl fmt::Display for CodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Color::new(self.code.color, self.n))?;
        if !self.code.children.is_empty() {
            f.write_str("[")?;
            for (i, c) in self.code.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", c.display(self.n))?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// A rooted tree-like model. Children are kept sorted by canonical code
/// (ties by node id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    model: KripkeModel,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    codes: Vec<CanonicalCode>,
}

impl Tree {
    /// Exactly one node must have no parent.
    pub fn from_parents(
        ids: Vec<String>,
        parent: Vec<Option<usize>>,
        colors: Vec<Color>,
        ctx: VarContext,
    ) -> Result<Tree> {
        if parent.len() != ids.len() {
            return Err(Error::Precondition("one parent entry per node".into()));
        }
        let roots: Vec<usize> = (0..ids.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::NotRooted);
        }
        let pairs: Vec<(usize, usize)> = parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c)))
            .collect();
        let frame = KripkeFrame::from_pairs(ids, &pairs)?;
        let model = KripkeModel::from_colors(frame, ctx, colors)?;
        Tree::from_model(model)
    }

    /// Fails unless `model` is rooted and tree-like.
    pub fn from_model(model: KripkeModel) -> Result<Tree> {
        let root = model.root().ok_or(Error::NotRooted)?;
        if !model.frame().is_tree_like() {
            return Err(Error::NotATree);
        }
        let n = model.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (w, kids) in children.iter_mut().enumerate() {
            for &c in model.frame().covers(w) {
                parent[c] = Some(w);
                kids.push(c);
            }
        }
        let mut codes: Vec<Option<CanonicalCode>> = vec![None; n];
        for &w in model.frame().linear_extension().iter().rev() {
            let kids = children[w]
                .iter()
                .map(|&c| codes[c].clone().expect("children come later"))
                .collect();
            codes[w] = Some(CanonicalCode::new(model.color(w), kids));
        }
        let codes: Vec<CanonicalCode> = codes.into_iter().map(Option::unwrap).collect();
        for kids in &mut children {
            kids.sort_by(|&a, &b| {
                codes[a]
                    .cmp(&codes[b])
                    .then_with(|| model.id(a).cmp(model.id(b)))
            });
        }
        Ok(Tree {
            model,
            root,
            parent,
            children,
            codes,
        })
    }

    pub fn single(color: Color, ctx: &VarContext) -> Tree {
        CanonicalCode::leaf(color).to_tree(ctx)
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn into_model(self) -> KripkeModel {
        self.model
    }

    pub fn ctx(&self) -> &VarContext {
        self.model.ctx()
    }

    pub fn len(&self) -> usize {
        self.model.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn id(&self, w: usize) -> &str {
        self.model.id(w)
    }

    pub fn color(&self, w: usize) -> Color {
        self.model.color(w)
    }

    pub fn parent(&self, w: usize) -> Option<usize> {
        self.parent[w]
    }

    pub fn children(&self, w: usize) -> &[usize] {
        &self.children[w]
    }

    /// Code of the whole tree.
    pub fn code(&self) -> &CanonicalCode {
        &self.codes[self.root]
    }

    /// Code of the subtree generated by `w`.
    pub fn code_of(&self, w: usize) -> &CanonicalCode {
        &self.codes[w]
    }

    /// Number of nodes on a longest chain.
    pub fn depth(&self) -> usize {
        self.code().depth()
    }

    /// Nodes in pre-order (parents before children, children in stored order).
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(w) = stack.pop() {
            out.push(w);
            stack.extend(self.children[w].iter().rev());
        }
        out
    }

    /// The generated subtree at `w`, keeping node ids.
    pub fn subtree(&self, w: usize) -> Result<Tree> {
        self.model.frame().check_world(w)?;
        Tree::from_model(self.model.generated_submodel(w)?)
    }

    /// The submodel on `keep`, which must contain the root; the result is
    /// tree-like since predecessor sets of a tree stay linear.
    pub fn restrict(&self, keep: &[bool]) -> Result<Tree> {
        if !keep[self.root] {
            return Err(Error::Precondition("restriction must keep the root".into()));
        }
        let worlds: Vec<usize> = (0..self.len()).filter(|&w| keep[w]).collect();
        Tree::from_model(self.model.submodel(&worlds)?)
    }
}

/// Unravels a rooted model along immediate successors. Node ids are the world
/// ids on the path, joined with `/`.
pub fn unravel(m: &KripkeModel) -> Result<Tree> {
    let root = m.root().ok_or(Error::NotRooted)?;
    let mut ids = Vec::new();
    let mut parent = Vec::new();
    let mut colors = Vec::new();
    let mut stack = vec![(root, None::<usize>)];
    while let Some((w, par)) = stack.pop() {
        let me = ids.len();
        let id = match par {
            None => m.id(w).to_string(),
            Some(p) => format!("{}/{}", ids[p], m.id(w)),
        };
        ids.push(id);
        parent.push(par);
        colors.push(m.color(w));
        for &u in m.frame().covers(w).iter().rev() {
            stack.push((u, Some(me)));
        }
    }
    Tree::from_parents(ids, parent, colors, m.ctx().clone())
}

/// The map sending each path of `unravel(m)` to its last world.
pub fn natural_map(t: &Tree, m: &KripkeModel) -> Result<NodeMap> {
    let mut images = Vec::with_capacity(t.len());
    for node in 0..t.len() {
        let id = t.id(node);
        let last = match t.parent(node) {
            None => id,
            Some(p) => id
                .strip_prefix(t.id(p))
                .and_then(|rest| rest.strip_prefix('/'))
                .ok_or_else(|| Error::Precondition(format!("`{id}` is not a path")))?,
        };
        images.push(m.world(last)?);
    }
    Ok(NodeMap::new(images))
}

/// Monotonic (order and colors) and satisfies the forth condition.
pub fn is_pmorphism(f: &NodeMap, src: &KripkeModel, dst: &KripkeModel) -> bool {
    if !is_monotonic(f, src, dst) {
        return false;
    }
    (0..src.len()).all(|w| {
        dst.frame()
            .up(f.get(w))
            .iter()
            .all(|&target| src.frame().up(w).iter().any(|&u| f.get(u) == target))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::VarContext;

    fn diamond() -> KripkeModel {
        let frame = KripkeFrame::new(
            &["r", "a", "b", "t"],
            &[("r", "a"), ("r", "b"), ("a", "t"), ("b", "t")],
        )
        .unwrap();
        let colors = ["00", "01", "10", "11"]
            .iter()
            .map(|c| Color::parse(c).unwrap())
            .collect();
        KripkeModel::from_colors(frame, VarContext::standard(2), colors).unwrap()
    }

    #[test]
    fn unravel_single_world() {
        let ctx = VarContext::standard(1);
        let t = Tree::single(Color::parse("1").unwrap(), &ctx);
        let u = unravel(t.model()).unwrap();
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn unravel_diamond_duplicates_top() {
        let d = diamond();
        let t = unravel(&d).unwrap();
        assert_eq!(t.len(), 5);
        let ids: Vec<&str> = t.model().frame().ids().iter().map(String::as_str).collect();
        assert!(ids.contains(&"r/a/t") && ids.contains(&"r/b/t"));
        let alpha = natural_map(&t, &d).unwrap();
        assert!(is_pmorphism(&alpha, t.model(), &d));
        assert_eq!(alpha.get(t.root()), d.root().unwrap());
        let t_ab = t.model().world("r/a/t").unwrap();
        assert_eq!(alpha.get(t_ab), 3);
    }

    #[test]
    fn unravel_chain_is_isomorphic() {
        let code = CanonicalCode::parse("00[01[11]]").unwrap().0;
        let chain = code.to_tree(&VarContext::standard(2));
        let u = unravel(chain.model()).unwrap();
        assert_eq!(u.code(), &code);
        assert!(is_pmorphism(
            &natural_map(&u, chain.model()).unwrap(),
            u.model(),
            chain.model()
        ));
    }

    #[test]
    fn identity_is_pmorphism_and_collapse_is_not() {
        let d = diamond();
        assert!(is_pmorphism(&NodeMap::identity(d.len()), &d, &d));
        let ctx = VarContext::standard(2);
        let chain = CanonicalCode::parse("00[11]").unwrap().0.to_tree(&ctx);
        let single = Tree::single(Color::parse("00").unwrap(), &ctx);
        assert!(!is_pmorphism(
            &NodeMap::new(vec![0, 0]),
            chain.model(),
            single.model()
        ));
    }

    #[test]
    fn unravel_requires_root() {
        let frame = KripkeFrame::new::<&str>(&["a", "b"], &[]).unwrap();
        let m = KripkeModel::from_colors(
            frame,
            VarContext::standard(1),
            vec![Color::new(0, 1), Color::new(1, 1)],
        )
        .unwrap();
        assert_eq!(unravel(&m).unwrap_err(), Error::NotRooted);
    }

    #[test]
    fn codes_identify_isomorphic_trees() {
        let ctx = VarContext::standard(2);
        let a = CanonicalCode::parse("00[10,01[11]]").unwrap().0;
        let b = CanonicalCode::parse("00[01[11],10]").unwrap().0;
        assert_eq!(a, b);
        assert_eq!(a.display(2).to_string(), "00[10,01[11]]");
        let t = a.to_tree(&ctx);
        assert_eq!(t.code(), &a);
        assert_eq!(t.depth(), 3);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn from_model_rejects_non_trees() {
        assert_eq!(Tree::from_model(diamond()).unwrap_err(), Error::NotATree);
    }
}
