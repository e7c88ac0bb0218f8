//! UTC timestamps in the fixed 20-digit form `YYYYMMDDHHMMSSffffff`.
//!
//! The 20-digit string is the only wire form of a timestamp: it appears
//! verbatim inside hash preimages, sidecar records, JSON fields, and CLI
//! output. Fields are zero-padded, so lexicographic order on the string
//! equals chronological order.

use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, W3idError};

/// Length of the wire form: 4+2+2+2+2+2+6 digits.
pub const TIMESTAMP_DIGITS: usize = 20;

const MICROS_PER_DAY: i64 = 86_400_000_000;

/// A calendar-valid UTC instant at microsecond precision.
///
/// Field order gives the derived `Ord` chronological meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    year: u16,
    month: u8,
    day: u8,
    hour: u8,
    minute: u8,
    second: u8,
    micro: u32,
}

impl Timestamp {
    /// Build a timestamp from civil UTC fields, rejecting anything that is
    /// not a real instant. Years range 0001-9999; leap seconds (second 60)
    /// are rejected.
    pub fn new(
        year: u16,
        month: u8,
        day: u8,
        hour: u8,
        minute: u8,
        second: u8,
        micro: u32,
    ) -> Result<Self> {
        if year == 0 || year > 9999 {
            return Err(W3idError::OutOfRange { field: "year", value: year as u32 });
        }
        if month == 0 || month > 12 {
            return Err(W3idError::OutOfRange { field: "month", value: month as u32 });
        }
        if day == 0 || day > 31 {
            return Err(W3idError::OutOfRange { field: "day", value: day as u32 });
        }
        if hour > 23 {
            return Err(W3idError::OutOfRange { field: "hour", value: hour as u32 });
        }
        if minute > 59 {
            return Err(W3idError::OutOfRange { field: "minute", value: minute as u32 });
        }
        if second > 59 {
            return Err(W3idError::OutOfRange { field: "second", value: second as u32 });
        }
        if micro > 999_999 {
            return Err(W3idError::OutOfRange { field: "microsecond", value: micro });
        }
        if day > days_in_month(year, month) {
            return Err(W3idError::InvalidDate { year, month, day });
        }
        Ok(Timestamp { year, month, day, hour, minute, second, micro })
    }

    /// Render the 20-digit wire form.
    pub fn format(&self) -> String {
        format!(
            "{:04}{:02}{:02}{:02}{:02}{:02}{:06}",
            self.year, self.month, self.day, self.hour, self.minute, self.second, self.micro
        )
    }

    /// Parse the 20-digit wire form back into a timestamp.
    pub fn parse(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != TIMESTAMP_DIGITS {
            return Err(W3idError::WrongLength(bytes.len()));
        }
        if let Some(pos) = bytes.iter().position(|b| !b.is_ascii_digit()) {
            return Err(W3idError::NonDigit(pos));
        }
        let field = |range: std::ops::Range<usize>| -> u32 {
            bytes[range].iter().fold(0u32, |acc, b| acc * 10 + (b - b'0') as u32)
        };
        Timestamp::new(
            field(0..4) as u16,
            field(4..6) as u8,
            field(6..8) as u8,
            field(8..10) as u8,
            field(10..12) as u8,
            field(12..14) as u8,
            field(14..20),
        )
    }

    pub fn year(&self) -> u16 {
        self.year
    }
    pub fn month(&self) -> u8 {
        self.month
    }
    pub fn day(&self) -> u8 {
        self.day
    }
    pub fn hour(&self) -> u8 {
        self.hour
    }
    pub fn minute(&self) -> u8 {
        self.minute
    }
    pub fn second(&self) -> u8 {
        self.second
    }
    pub fn microsecond(&self) -> u32 {
        self.micro
    }

    /// Microseconds since the Unix epoch (negative before 1970).
    pub fn to_epoch_micros(&self) -> i64 {
        let days = days_from_civil(self.year as i64, self.month as u32, self.day as u32);
        let in_day = ((self.hour as i64 * 60 + self.minute as i64) * 60 + self.second as i64)
            * 1_000_000
            + self.micro as i64;
        days * MICROS_PER_DAY + in_day
    }

    /// Inverse of [`to_epoch_micros`](Self::to_epoch_micros); errors with
    /// `Overflow` when the instant falls outside years 0001-9999.
    pub fn from_epoch_micros(micros: i64) -> Result<Self> {
        let days = micros.div_euclid(MICROS_PER_DAY);
        let in_day = micros.rem_euclid(MICROS_PER_DAY);
        let (year, month, day) = civil_from_days(days);
        if !(1..=9999).contains(&year) {
            return Err(W3idError::Overflow);
        }
        let micro = (in_day % 1_000_000) as u32;
        let secs = in_day / 1_000_000;
        Ok(Timestamp {
            year: year as u16,
            month: month as u8,
            day: day as u8,
            hour: (secs / 3600) as u8,
            minute: (secs / 60 % 60) as u8,
            second: (secs % 60) as u8,
            micro,
        })
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl std::str::FromStr for Timestamp {
    type Err = W3idError;

    fn from_str(s: &str) -> Result<Self> {
        Timestamp::parse(s)
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.format())
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse(&s).map_err(D::Error::custom)
    }
}

pub(crate) fn is_leap_year(year: u16) -> bool {
    (year.is_multiple_of(4) && !year.is_multiple_of(100)) || year.is_multiple_of(400)
}

pub(crate) fn days_in_month(year: u16, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

// Proleptic-Gregorian day counting relative to 1970-01-01.
fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = if m > 2 { m - 3 } else { m + 9 } as i64;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719468;
    let era = if z >= 0 { z } else { z - 146096 } / 146097;
    let doe = z - era * 146097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

/// Source of the current UTC time.
pub trait Clock: Send + Sync {
    fn now(&self) -> Result<Timestamp>;
}

impl<C: Clock + ?Sized> Clock for Arc<C> {
    fn now(&self) -> Result<Timestamp> {
        (**self).now()
    }
}

/// The real wall clock, truncated (not rounded) to microseconds.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Result<Timestamp> {
        let elapsed = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_err(|e| W3idError::ClockUnavailable(e.to_string()))?;
        let micros = i64::try_from(elapsed.as_micros()).map_err(|_| W3idError::Overflow)?;
        Timestamp::from_epoch_micros(micros)
    }
}

/// Current UTC time from the given clock.
pub fn now_utc(clock: &dyn Clock) -> Result<Timestamp> {
    clock.now()
}

/// A settable clock for tests and reproducible runs.
pub struct ManualClock {
    micros: Mutex<i64>,
}

impl ManualClock {
    pub fn new(start: Timestamp) -> Self {
        ManualClock { micros: Mutex::new(start.to_epoch_micros()) }
    }

    pub fn set(&self, ts: Timestamp) {
        *self.micros.lock().expect("manual clock poisoned") = ts.to_epoch_micros();
    }

    /// Shift the clock; negative deltas simulate a clock stepping backwards.
    pub fn advance_micros(&self, delta: i64) {
        *self.micros.lock().expect("manual clock poisoned") += delta;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Result<Timestamp> {
        Timestamp::from_epoch_micros(*self.micros.lock().expect("manual clock poisoned"))
    }
}

/// Issues strictly increasing timestamps within one process.
///
/// When the wall clock has advanced beyond the last issued value the clock
/// reading is used as-is; otherwise the previous issue is bumped by one
/// microsecond, so issuance never fails on clock regressions.
pub struct MonotonicIssuer {
    clock: Arc<dyn Clock>,
    last_micros: Mutex<Option<i64>>,
}

impl MonotonicIssuer {
    pub fn new(clock: Arc<dyn Clock>) -> Self {
        MonotonicIssuer { clock, last_micros: Mutex::new(None) }
    }

    /// Issuer backed by the system clock.
    pub fn system() -> Self {
        Self::new(Arc::new(SystemClock))
    }

    /// Issue the next timestamp. Strictly greater than every timestamp this
    /// issuer has returned before; `Overflow` past year 9999 signals a
    /// grossly stalled clock.
    pub fn next(&self) -> Result<Timestamp> {
        let mut last = self.last_micros.lock().expect("issuer poisoned");
        let now = self.clock.now()?.to_epoch_micros();
        let issue = match *last {
            Some(prev) => now.max(prev + 1),
            None => now,
        };
        let ts = Timestamp::from_epoch_micros(issue)?;
        *last = Some(issue);
        Ok(ts)
    }
}
