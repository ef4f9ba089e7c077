//! Accounts, password hashing and signed bearer tokens.
//!
//! Passwords are stored as PBKDF2-HMAC-SHA256 with a per-account random
//! salt. Tokens are `base64url(claims) "." base64url(hmac)`; they carry the
//! username and an expiry but not the role, which is looked up on every
//! request so demotions take effect immediately.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use hmac::{Hmac, Mac};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use subtle::ConstantTimeEq;

/// Shortest accepted password, in characters.
pub const MIN_PASSWORD_CHARS: usize = 8;

/// Token lifetime.
pub const TOKEN_TTL_SECS: u64 = 24 * 60 * 60;

pub const DEFAULT_PBKDF2_ROUNDS: u32 = 100_000;

const SALT_BYTES: usize = 16;
const HASH_BYTES: usize = 32;

#[derive(Debug, thiserror::Error)]
pub enum AuthError {
    #[error("username already taken")]
    UsernameTaken,
    #[error("password must be at least {MIN_PASSWORD_CHARS} characters")]
    WeakPassword,
    #[error("username must be 1-64 visible characters")]
    InvalidUsername,
    #[error("invalid username or password")]
    InvalidCredentials,
    #[error("authentication required")]
    Unauthenticated,
    #[error("insufficient role")]
    Forbidden,
    #[error("account storage: {0}")]
    Storage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Admin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserAccount {
    pub username: String,
    pub password_hash: String,
    pub role: Role,
}

/// Seconds since the Unix epoch. Injectable so tests can move time.
pub trait Clock: Send + Sync {
    fn now(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    }
}

#[derive(Debug, Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn new(start: u64) -> Self {
        ManualClock(AtomicU64::new(start))
    }

    pub fn advance(&self, secs: u64) {
        self.0.fetch_add(secs, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

fn derive(password: &str, salt: &[u8], rounds: u32) -> [u8; HASH_BYTES] {
    let mut out = [0u8; HASH_BYTES];
    pbkdf2::pbkdf2_hmac::<Sha256>(password.as_bytes(), salt, rounds, &mut out);
    out
}

/// `pbkdf2-sha256$<rounds>$<salt>$<hash>`, base64url fields.
pub fn hash_password(password: &str, rounds: u32) -> String {
    let mut salt = [0u8; SALT_BYTES];
    rand::rng().fill_bytes(&mut salt);
    let hash = derive(password, &salt, rounds);
    format!("pbkdf2-sha256${rounds}${}${}", URL_SAFE_NO_PAD.encode(salt), URL_SAFE_NO_PAD.encode(hash))
}

pub fn verify_password(password: &str, encoded: &str) -> bool {
    let parts: Vec<&str> = encoded.split('$').collect();
    let [scheme, rounds, salt, hash] = parts[..] else { return false };
    let (Ok(rounds), Ok(salt), Ok(hash)) =
        (rounds.parse::<u32>(), URL_SAFE_NO_PAD.decode(salt), URL_SAFE_NO_PAD.decode(hash))
    else {
        return false;
    };
    scheme == "pbkdf2-sha256" && bool::from(derive(password, &salt, rounds).ct_eq(hash.as_slice()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    pub sub: String,
    pub exp: u64,
}

pub struct TokenSigner {
    secret: Vec<u8>,
}

impl TokenSigner {
    pub fn new(secret: impl Into<Vec<u8>>) -> Self {
        TokenSigner { secret: secret.into() }
    }

    fn mac(&self) -> Hmac<Sha256> {
        Hmac::<Sha256>::new_from_slice(&self.secret).expect("hmac accepts any key length")
    }

    pub fn sign(&self, claims: &Claims) -> String {
        let payload = URL_SAFE_NO_PAD.encode(serde_json::to_vec(claims).expect("claims serialize"));
        let mut mac = self.mac();
        mac.update(payload.as_bytes());
        format!("{payload}.{}", URL_SAFE_NO_PAD.encode(mac.finalize().into_bytes()))
    }

    /// Checks the signature and expiry.
    pub fn verify(&self, token: &str, now: u64) -> Result<Claims, AuthError> {
        let (payload, sig) = token.split_once('.').ok_or(AuthError::Unauthenticated)?;
        let sig = URL_SAFE_NO_PAD.decode(sig).map_err(|_| AuthError::Unauthenticated)?;
        let mut mac = self.mac();
        mac.update(payload.as_bytes());
        mac.verify_slice(&sig).map_err(|_| AuthError::Unauthenticated)?;
        let raw = URL_SAFE_NO_PAD.decode(payload).map_err(|_| AuthError::Unauthenticated)?;
        let claims: Claims = serde_json::from_slice(&raw).map_err(|_| AuthError::Unauthenticated)?;
        if now >= claims.exp {
            return Err(AuthError::Unauthenticated);
        }
        Ok(claims)
    }
}

/// An authenticated caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Principal {
    pub username: String,
    pub role: Role,
}

impl Principal {
    pub fn is_admin(&self) -> bool {
        self.role == Role::Admin
    }

    pub fn require_admin(&self) -> Result<(), AuthError> {
        if self.is_admin() {
            Ok(())
        } else {
            Err(AuthError::Forbidden)
        }
    }
}

pub struct AuthConfig {
    pub secret: Vec<u8>,
    pub rounds: u32,
    pub token_ttl: u64,
    /// `users.json` is kept here when set.
    pub dir: Option<PathBuf>,
}

pub struct Auth {
    users: RwLock<BTreeMap<String, UserAccount>>,
    /// Serializes persistence so the file matches the map.
    file_lock: std::sync::Mutex<()>,
    signer: TokenSigner,
    clock: Arc<dyn Clock>,
    rounds: u32,
    token_ttl: u64,
    path: Option<PathBuf>,
    /// Verified against on unknown usernames so both failure paths cost one
    /// key derivation.
    dummy_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenResponse {
    pub token: String,
    pub expires_at: u64,
    pub role: Role,
}

impl Auth {
    pub fn new(cfg: AuthConfig, clock: Arc<dyn Clock>) -> Result<Auth, AuthError> {
        let path = cfg.dir.map(|d| d.join("users.json"));
        let users = match &path {
            Some(p) if p.exists() => {
                let raw = fs::read(p).map_err(|e| AuthError::Storage(e.to_string()))?;
                let list: Vec<UserAccount> = serde_json::from_slice(&raw).map_err(|e| AuthError::Storage(e.to_string()))?;
                list.into_iter().map(|u| (u.username.clone(), u)).collect()
            }
            _ => BTreeMap::new(),
        };
        Ok(Auth {
            users: RwLock::new(users),
            file_lock: std::sync::Mutex::new(()),
            signer: TokenSigner::new(cfg.secret),
            clock,
            rounds: cfg.rounds,
            token_ttl: cfg.token_ttl,
            path,
            dummy_hash: hash_password("not a real password", cfg.rounds),
        })
    }

    fn persist(&self) -> Result<(), AuthError> {
        let Some(path) = &self.path else { return Ok(()) };
        let _guard = self.file_lock.lock().expect("auth file lock poisoned");
        let list: Vec<UserAccount> = self.users.read().expect("users poisoned").values().cloned().collect();
        let tmp = path.with_extension("json.tmp");
        let bytes = serde_json::to_vec_pretty(&list).expect("accounts serialize");
        fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path)).map_err(|e| AuthError::Storage(e.to_string()))
    }

    fn check_new(username: &str, password: &str) -> Result<(), AuthError> {
        let n = username.chars().count();
        if n == 0 || n > 64 || username.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(AuthError::InvalidUsername);
        }
        if password.chars().count() < MIN_PASSWORD_CHARS {
            return Err(AuthError::WeakPassword);
        }
        Ok(())
    }

    fn insert(&self, username: &str, password: &str, role: Role) -> Result<UserAccount, AuthError> {
        Self::check_new(username, password)?;
        let account =
            UserAccount { username: username.to_string(), password_hash: hash_password(password, self.rounds), role };
        {
            let mut users = self.users.write().expect("users poisoned");
            if users.contains_key(username) {
                return Err(AuthError::UsernameTaken);
            }
            users.insert(username.to_string(), account.clone());
        }
        self.persist()?;
        Ok(account)
    }

    /// New accounts always get the user role.
    pub fn register(&self, username: &str, password: &str) -> Result<UserAccount, AuthError> {
        self.insert(username, password, Role::User)
    }

    /// Creates `username` as an admin unless an account of that name exists.
    pub fn seed_admin(&self, username: &str, password: &str) -> Result<bool, AuthError> {
        match self.insert(username, password, Role::Admin) {
            Ok(_) => Ok(true),
            Err(AuthError::UsernameTaken) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn set_role(&self, username: &str, role: Role) -> Result<(), AuthError> {
        {
            let mut users = self.users.write().expect("users poisoned");
            let account = users.get_mut(username).ok_or(AuthError::InvalidCredentials)?;
            account.role = role;
        }
        self.persist()
    }

    pub fn login(&self, username: &str, password: &str) -> Result<TokenResponse, AuthError> {
        let account = self.users.read().expect("users poisoned").get(username).cloned();
        let Some(account) = account else {
            verify_password(password, &self.dummy_hash);
            return Err(AuthError::InvalidCredentials);
        };
        if !verify_password(password, &account.password_hash) {
            return Err(AuthError::InvalidCredentials);
        }
        let expires_at = self.clock.now() + self.token_ttl;
        let token = self.signer.sign(&Claims { sub: account.username.clone(), exp: expires_at });
        Ok(TokenResponse { token, expires_at, role: account.role })
    }

    /// Resolves a bearer token to its account.
    pub fn authenticate(&self, token: &str) -> Result<Principal, AuthError> {
        let claims = self.signer.verify(token, self.clock.now())?;
        let users = self.users.read().expect("users poisoned");
        let account = users.get(&claims.sub).ok_or(AuthError::Unauthenticated)?;
        Ok(Principal { username: account.username.clone(), role: account.role })
    }

    pub fn account(&self, username: &str) -> Option<UserAccount> {
        self.users.read().expect("users poisoned").get(username).cloned()
    }
}

/// Reads the token secret from `dir/token_secret`, creating it when absent.
pub fn load_or_create_secret(dir: &Path) -> std::io::Result<Vec<u8>> {
    let path = dir.join("token_secret");
    if let Ok(existing) = fs::read_to_string(&path) {
        if let Ok(bytes) = URL_SAFE_NO_PAD.decode(existing.trim()) {
            if !bytes.is_empty() {
                return Ok(bytes);
            }
        }
    }
    let mut secret = vec![0u8; 32];
    rand::rng().fill_bytes(&mut secret);
    fs::create_dir_all(dir)?;
    fs::write(&path, URL_SAFE_NO_PAD.encode(&secret))?;
    Ok(secret)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn auth(clock: Arc<ManualClock>) -> Auth {
        Auth::new(AuthConfig { secret: b"test secret".to_vec(), rounds: 10, token_ttl: TOKEN_TTL_SECS, dir: None }, clock)
            .unwrap()
    }

    #[test]
    fn password_hash_round_trip() {
        let h = hash_password("correct horse", 10);
        assert!(verify_password("correct horse", &h));
        assert!(!verify_password("wrong horse", &h));
        assert!(!h.contains("correct horse"));
        assert_ne!(h, hash_password("correct horse", 10));
        assert!(!verify_password("x", "garbage"));
    }

    #[test]
    fn register_and_login() {
        let clock = Arc::new(ManualClock::new(1_000));
        let a = auth(clock.clone());
        assert_eq!(a.register("ana", "longenough").unwrap().role, Role::User);
        assert!(matches!(a.register("ana", "longenough"), Err(AuthError::UsernameTaken)));
        assert!(matches!(a.register("bob", "abc"), Err(AuthError::WeakPassword)));
        assert!(matches!(a.login("ana", "nope-nope"), Err(AuthError::InvalidCredentials)));
        assert!(matches!(a.login("nobody", "longenough"), Err(AuthError::InvalidCredentials)));
        let t = a.login("ana", "longenough").unwrap();
        assert_eq!(a.authenticate(&t.token).unwrap().username, "ana");
        clock.advance(TOKEN_TTL_SECS);
        assert!(matches!(a.authenticate(&t.token), Err(AuthError::Unauthenticated)));
    }

    #[test]
    fn tampered_tokens_are_rejected() {
        let clock = Arc::new(ManualClock::new(0));
        let a = auth(clock);
        a.register("ana", "longenough").unwrap();
        let t = a.login("ana", "longenough").unwrap().token;
        let forged = TokenSigner::new(b"other".to_vec()).sign(&Claims { sub: "ana".into(), exp: u64::MAX });
        assert!(a.authenticate(&forged).is_err());
        let (payload, _) = t.split_once('.').unwrap();
        assert!(a.authenticate(payload).is_err());
        assert!(a.authenticate("").is_err());
    }

    #[test]
    fn role_changes_apply_to_existing_tokens() {
        let a = auth(Arc::new(ManualClock::new(0)));
        a.register("ana", "longenough").unwrap();
        let t = a.login("ana", "longenough").unwrap().token;
        assert!(!a.authenticate(&t).unwrap().is_admin());
        a.set_role("ana", Role::Admin).unwrap();
        assert!(a.authenticate(&t).unwrap().is_admin());
    }

    #[test]
    fn accounts_persist() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = || AuthConfig { secret: b"s".to_vec(), rounds: 10, token_ttl: 60, dir: Some(dir.path().to_path_buf()) };
        {
            let a = Auth::new(cfg(), Arc::new(SystemClock)).unwrap();
            assert!(a.seed_admin("root", "rootpassword").unwrap());
        }
        let a = Auth::new(cfg(), Arc::new(SystemClock)).unwrap();
        assert!(!a.seed_admin("root", "rootpassword").unwrap());
        assert_eq!(a.account("root").unwrap().role, Role::Admin);
        assert!(a.login("root", "rootpassword").is_ok());
    }
}
