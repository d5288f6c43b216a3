//! Zhang-Suen iterative thinning.

use alloc::vec::Vec;

use super::BinaryImage;

/// The 8-neighborhood of `(x, y)` in the circular order used by the
/// transition count: N, NE, E, SE, S, SW, W, NW.
#[inline]
fn neighborhood(img: &BinaryImage, x: isize, y: isize) -> [bool; 8] {
    [
        img.get_or_false(x, y - 1),
        img.get_or_false(x + 1, y - 1),
        img.get_or_false(x + 1, y),
        img.get_or_false(x + 1, y + 1),
        img.get_or_false(x, y + 1),
        img.get_or_false(x - 1, y + 1),
        img.get_or_false(x - 1, y),
        img.get_or_false(x - 1, y - 1),
    ]
}

/// Thin foreground strokes to single-pixel width.
///
/// Runs Zhang-Suen two-subiteration passes until a fixpoint: a pixel is
/// deleted when it has 2..=6 foreground neighbors, exactly one 0->1
/// transition around its neighborhood, and the subiteration's two
/// directional products vanish. The output is a subset of the input
/// foreground, and re-running the operator leaves it unchanged.
pub fn skeletonize(bin: &BinaryImage) -> BinaryImage {
    let mut img = bin.clone();
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut to_clear: Vec<(usize, usize)> = Vec::new();

    loop {
        let mut changed = false;
        for sub in 0..2 {
            to_clear.clear();
            for y in 0..h {
                for x in 0..w {
                    if !img.get(x as usize, y as usize) {
                        continue;
                    }
                    let nb = neighborhood(&img, x, y);
                    let count = nb.iter().filter(|b| **b).count();
                    if !(2..=6).contains(&count) {
                        continue;
                    }
                    let transitions = (0..8)
                        .filter(|&i| !nb[i] && nb[(i + 1) % 8])
                        .count();
                    if transitions != 1 {
                        continue;
                    }
                    // nb indices: 0 = N, 2 = E, 4 = S, 6 = W.
                    let (first, second) = if sub == 0 {
                        (nb[0] && nb[2] && nb[4], nb[2] && nb[4] && nb[6])
                    } else {
                        (nb[0] && nb[2] && nb[6], nb[0] && nb[4] && nb[6])
                    };
                    if !first && !second {
                        to_clear.push((x as usize, y as usize));
                    }
                }
            }
            if !to_clear.is_empty() {
                changed = true;
                for &(x, y) in &to_clear {
                    img.set(x, y, false);
                }
            }
        }
        if !changed {
            return img;
        }
    }
}
