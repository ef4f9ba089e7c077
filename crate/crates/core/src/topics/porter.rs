//! Porter stemmer, gensim revision.
//!
//! Differs from the 1980 publication in three places: `bli -> ble` replaces
//! `abli -> able`, step 2 adds `logi -> log`, and words of one or two
//! characters are returned unchanged. Indexing below deliberately follows the
//! reference implementation, including its habit of leaving stale characters
//! past `k` in the buffer and reading `b[k - 1]` with Python wrap-around
//! semantics when `k == 0`.

struct Stemmer {
    b: Vec<char>,
    k: usize,
    j: isize,
}

impl Stemmer {
    /// Python-style index: negative values count from the end.
    fn at(&self, i: isize) -> char {
        if i < 0 {
            self.b[(self.b.len() as isize + i) as usize]
        } else {
            self.b[i as usize]
        }
    }

    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            'a' | 'e' | 'i' | 'o' | 'u' => false,
            'y' => i == 0 || !self.cons(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `b[0..=j]`.
    fn m(&self) -> usize {
        let j = self.j;
        let mut i: isize = 0;
        loop {
            if i > j {
                return 0;
            }
            if !self.cons(i as usize) {
                break;
            }
            i += 1;
        }
        i += 1;
        let mut n = 0;
        loop {
            loop {
                if i > j {
                    return n;
                }
                if self.cons(i as usize) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > j {
                    return n;
                }
                if !self.cons(i as usize) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.cons(i as usize))
    }

    fn double_c(&self, j: isize) -> bool {
        j > 0 && self.b[j as usize] == self.b[j as usize - 1] && self.cons(j as usize)
    }

    fn cvc(&self, i: isize) -> bool {
        if i < 2 {
            return false;
        }
        let i = i as usize;
        if !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], 'w' | 'x' | 'y')
    }

    fn ends(&mut self, s: &str) -> bool {
        let s: Vec<char> = s.chars().collect();
        if s[s.len() - 1] != self.b[self.k] {
            return false;
        }
        if s.len() > self.k + 1 {
            return false;
        }
        let start = self.k + 1 - s.len();
        if self.b[start..=self.k] != s[..] {
            return false;
        }
        self.j = self.k as isize - s.len() as isize;
        true
    }

    fn set_to(&mut self, s: &str) {
        self.b.truncate((self.j + 1) as usize);
        self.b.extend(s.chars());
        self.k = self.b.len() - 1;
    }

    fn r(&mut self, s: &str) {
        if self.m() > 0 {
            self.set_to(s);
        }
    }

    fn step1ab(&mut self) {
        if self.b[self.k] == 's' {
            if self.ends("sses") {
                self.k -= 2;
            } else if self.ends("ies") {
                self.set_to("i");
            } else if self.at(self.k as isize - 1) != 's' {
                self.k -= 1;
            }
        }
        if self.ends("eed") {
            if self.m() > 0 {
                self.k -= 1;
            }
        } else if (self.ends("ed") || self.ends("ing")) && self.vowel_in_stem() {
            self.k = self.j as usize;
            if self.ends("at") {
                self.set_to("ate");
            } else if self.ends("bl") {
                self.set_to("ble");
            } else if self.ends("iz") {
                self.set_to("ize");
            } else if self.double_c(self.k as isize) {
                if !matches!(self.at(self.k as isize - 1), 'l' | 's' | 'z') {
                    self.k -= 1;
                }
            } else if self.m() == 1 && self.cvc(self.k as isize) {
                self.set_to("e");
            }
        }
    }

    fn step1c(&mut self) {
        if self.ends("y") && self.vowel_in_stem() {
            self.b.truncate(self.k);
            self.b.push('i');
        }
    }

    fn step2(&mut self) {
        match self.at(self.k as isize - 1) {
            'a' => {
                if self.ends("ational") {
                    self.r("ate")
                } else if self.ends("tional") {
                    self.r("tion")
                }
            }
            'c' => {
                if self.ends("enci") {
                    self.r("ence")
                } else if self.ends("anci") {
                    self.r("ance")
                }
            }
            'e' => {
                if self.ends("izer") {
                    self.r("ize")
                }
            }
            'l' => {
                if self.ends("bli") {
                    self.r("ble")
                } else if self.ends("alli") {
                    self.r("al")
                } else if self.ends("entli") {
                    self.r("ent")
                } else if self.ends("eli") {
                    self.r("e")
                } else if self.ends("ousli") {
                    self.r("ous")
                }
            }
            'o' => {
                if self.ends("ization") {
                    self.r("ize")
                } else if self.ends("ation") || self.ends("ator") {
                    self.r("ate")
                }
            }
            's' => {
                if self.ends("alism") {
                    self.r("al")
                } else if self.ends("iveness") {
                    self.r("ive")
                } else if self.ends("fulness") {
                    self.r("ful")
                } else if self.ends("ousness") {
                    self.r("ous")
                }
            }
            't' => {
                if self.ends("aliti") {
                    self.r("al")
                } else if self.ends("iviti") {
                    self.r("ive")
                } else if self.ends("biliti") {
                    self.r("ble")
                }
            }
            'g' => {
                if self.ends("logi") {
                    self.r("log")
                }
            }
            _ => {}
        }
    }

    fn step3(&mut self) {
        match self.b[self.k] {
            'e' => {
                if self.ends("icate") {
                    self.r("ic")
                } else if self.ends("ative") {
                    self.r("")
                } else if self.ends("alize") {
                    self.r("al")
                }
            }
            'i' => {
                if self.ends("iciti") {
                    self.r("ic")
                }
            }
            'l' => {
                if self.ends("ical") {
                    self.r("ic")
                } else if self.ends("ful") {
                    self.r("")
                }
            }
            's' => {
                if self.ends("ness") {
                    self.r("")
                }
            }
            _ => {}
        }
    }

    fn step4(&mut self) {
        let found = match self.at(self.k as isize - 1) {
            'a' => self.ends("al"),
            'c' => self.ends("ance") || self.ends("ence"),
            'e' => self.ends("er"),
            'i' => self.ends("ic"),
            'l' => self.ends("able") || self.ends("ible"),
            'n' => self.ends("ant") || self.ends("ement") || self.ends("ment") || self.ends("ent"),
            'o' => (self.ends("ion") && matches!(self.at(self.j), 's' | 't')) || self.ends("ou"),
            's' => self.ends("ism"),
            't' => self.ends("ate") || self.ends("iti"),
            'u' => self.ends("ous"),
            'v' => self.ends("ive"),
            'z' => self.ends("ize"),
            _ => false,
        };
        if found && self.m() > 1 {
            self.k = self.j as usize;
        }
    }

    fn step5(&mut self) {
        let k = self.k;
        self.j = k as isize;
        if self.b[k] == 'e' {
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(k as isize - 1)) {
                self.k -= 1;
            }
        }
        if self.b[self.k] == 'l' && self.double_c(self.k as isize) && self.m() > 1 {
            self.k -= 1;
        }
    }
}

/// Stems one lowercase word.
pub fn stem(word: &str) -> String {
    let b: Vec<char> = word.to_lowercase().chars().collect();
    if b.len() <= 2 {
        return b.into_iter().collect();
    }
    let k = b.len() - 1;
    let mut s = Stemmer { b, k, j: 0 };
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b[..=s.k].iter().collect()
}

#[cfg(test)]
mod tests {
    use super::stem;

    #[test]
    fn examples() {
        for (w, want) in [
            ("papers", "paper"),
            ("tracking", "track"),
            ("images", "imag"),
            ("recognition", "recognit"),
            ("proposed", "propos"),
            ("relay", "relai"),
            ("privacy", "privaci"),
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("hopping", "hop"),
            ("filing", "file"),
            ("generalization", "gener"),
            ("by", "by"),
        ] {
            assert_eq!(stem(w), want, "{w}");
        }
    }
}
