//! Service configuration. Every option is a flag with an environment
//! variable fallback; flags win.

use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use insights_core::store::{Store, StoreError};

use crate::auth::{load_or_create_secret, Auth, AuthConfig, AuthError, Clock, DEFAULT_PBKDF2_ROUNDS, TOKEN_TTL_SECS};
use crate::http::AppState;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Auth(#[from] AuthError),
    #[error("token secret: {0}")]
    Secret(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Args)]
pub struct ServiceConfig {
    /// Directory holding the collections and accounts; in-memory when unset.
    #[arg(long, env = "INSIGHTS_DATA_DIR")]
    pub data_dir: Option<PathBuf>,

    #[arg(long, env = "INSIGHTS_PORT", default_value_t = 8080)]
    pub port: u16,

    /// Topic-model training threads.
    #[arg(long, env = "INSIGHTS_WORKERS", default_value_t = 2)]
    pub workers: usize,

    /// Token signing key. Generated and kept in the data directory if unset.
    #[arg(long, env = "INSIGHTS_TOKEN_SECRET", hide_env_values = true)]
    pub token_secret: Option<String>,

    #[arg(long, env = "INSIGHTS_TOKEN_TTL_SECS", default_value_t = TOKEN_TTL_SECS)]
    pub token_ttl_secs: u64,

    #[arg(long, env = "INSIGHTS_PBKDF2_ROUNDS", default_value_t = DEFAULT_PBKDF2_ROUNDS)]
    pub pbkdf2_rounds: u32,

    /// Seeded as an admin at startup if no account of that name exists.
    #[arg(long, env = "INSIGHTS_ADMIN_USERNAME")]
    pub admin_username: Option<String>,

    #[arg(long, env = "INSIGHTS_ADMIN_PASSWORD", hide_env_values = true)]
    pub admin_password: Option<String>,

    #[arg(long, env = "INSIGHTS_NO_CACHE")]
    pub no_cache: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            data_dir: None,
            port: 8080,
            workers: 2,
            token_secret: None,
            token_ttl_secs: TOKEN_TTL_SECS,
            pbkdf2_rounds: DEFAULT_PBKDF2_ROUNDS,
            admin_username: None,
            admin_password: None,
            no_cache: false,
        }
    }
}

impl ServiceConfig {
    pub fn open_store(&self) -> Result<Store, StoreError> {
        match &self.data_dir {
            Some(dir) => Store::open(dir),
            None => Ok(Store::in_memory()),
        }
    }

    fn secret(&self) -> Result<Vec<u8>, ConfigError> {
        if let Some(s) = &self.token_secret {
            if s.is_empty() {
                return Err(ConfigError::Invalid("token secret must not be empty".into()));
            }
            return Ok(s.as_bytes().to_vec());
        }
        match &self.data_dir {
            Some(dir) => Ok(load_or_create_secret(dir)?),
            None => {
                let mut key = vec![0u8; 32];
                rand::RngCore::fill_bytes(&mut rand::rng(), &mut key);
                Ok(key)
            }
        }
    }

    /// Opens the store and accounts and seeds the admin account.
    pub fn build(&self, clock: Arc<dyn Clock>) -> Result<AppState, ConfigError> {
        let store = Arc::new(self.open_store()?);
        store.set_cache_enabled(!self.no_cache);
        self.build_with_store(store, clock)
    }

    pub fn build_with_store(&self, store: Arc<Store>, clock: Arc<dyn Clock>) -> Result<AppState, ConfigError> {
        let auth = Auth::new(
            AuthConfig {
                secret: self.secret()?,
                rounds: self.pbkdf2_rounds.max(1),
                token_ttl: self.token_ttl_secs,
                dir: self.data_dir.clone(),
            },
            clock,
        )?;
        match (&self.admin_username, &self.admin_password) {
            (Some(u), Some(p)) => {
                auth.seed_admin(u, p)?;
            }
            (None, None) => {}
            _ => return Err(ConfigError::Invalid("admin username and password must be set together".into())),
        }
        Ok(AppState::new(store, auth, self.workers))
    }
}
