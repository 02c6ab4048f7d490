//! Generated stand-ins for the public datasets that could not be bundled.
//!
//! Each generator keeps the upstream column names and value conventions
//! (UCI `?` for missing cells, 0–1 normalized columns for Communities) and
//! plants the protected attribute's influence through correlated proxy
//! columns. They are deterministic in their fixed seed; the bundled CSVs
//! are their exact output.

use crate::error::{Error, Result};
use crate::ml::sigmoid;
use crate::rng::{streams, Rng};

pub const STANDINS: [&str; 4] = ["absenteeism", "heart", "passnyc", "communities"];

const SEED: u64 = 2019;

pub fn generate(name: &str) -> Result<String> {
    let mut rng = Rng::stream(SEED, streams::STANDIN);
    let sheet = match name {
        "absenteeism" => absenteeism(&mut rng),
        "heart" => heart(&mut rng),
        "passnyc" => passnyc(&mut rng),
        "communities" => communities(&mut rng),
        other => return Err(Error::InvalidArgument(format!("no stand-in named `{other}`"))),
    };
    sheet.to_csv()
}

struct Sheet {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Sheet {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

fn fx(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    // avoid "-0.00"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn int(x: f64) -> String {
    format!("{}", x.round() as i64)
}

fn pick(rng: &mut Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.uniform() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Absence records of 36 employees. Older employees take longer absences;
/// service time, children, drinking and weight track age.
fn absenteeism(rng: &mut Rng) -> Sheet {
    struct Employee {
        age: f64,
        service: f64,
        son: f64,
        drinker: bool,
        smoker: bool,
        pet: f64,
        education: usize,
        weight: f64,
        height: f64,
        transport: f64,
        distance: f64,
    }
    let employees: Vec<Employee> = (0..36)
        .map(|_| {
            let age = (27.0 + 31.0 * rng.uniform().powf(1.3)).floor();
            let service = ((age - 20.0) * 0.6 + 2.0 * rng.normal()).round().clamp(1.0, 29.0);
            let son = ((age - 25.0) / 10.0 + 0.8 * rng.normal()).floor().clamp(0.0, 4.0);
            let drinker = rng.bernoulli((0.25 + 0.02 * (age - 27.0)).min(0.9));
            let smoker = rng.bernoulli(0.08);
            let pet = pick(rng, &[0.6, 0.25, 0.1, 0.05]) as f64;
            let education = if rng.bernoulli((0.4 - 0.01 * (age - 27.0)).max(0.05)) {
                2 + rng.below(3)
            } else {
                1
            };
            let height = (171.0 + 6.0 * rng.normal()).round();
            let weight = (66.0 + 0.45 * (age - 27.0) + 9.0 * rng.normal()).round();
            let transport = (120.0 + 150.0 * rng.uniform()).round();
            let distance = (5.0 + 46.0 * rng.uniform()).round();
            Employee {
                age,
                service,
                son,
                drinker,
                smoker,
                pet,
                education,
                weight,
                height,
                transport,
                distance,
            }
        })
        .collect();
    let activity: Vec<f64> = (0..36).map(|_| 0.3 + rng.uniform()).collect();

    let mut s = Sheet::new(&[
        "ID",
        "Reason for absence",
        "Month of absence",
        "Day of the week",
        "Seasons",
        "Transportation expense",
        "Distance from Residence to Work",
        "Service time",
        "Age",
        "Work load Average/day",
        "Hit target",
        "Disciplinary failure",
        "Education",
        "Son",
        "Social drinker",
        "Social smoker",
        "Pet",
        "Weight",
        "Height",
        "Body mass index",
        "Absenteeism time in hours",
    ]);
    // reasons 0..=28; consultations, dental and physiotherapy dominate
    let mut reason_w = vec![0.6; 29];
    for (r, w) in [(0, 4.0), (23, 20.0), (28, 15.0), (27, 9.0), (13, 7.0), (19, 5.0), (22, 5.0), (26, 4.0), (25, 4.0), (10, 3.0), (18, 3.0), (11, 3.0)] {
        reason_w[r] = w;
    }
    for _ in 0..740 {
        let id = pick(rng, &activity);
        let e = &employees[id];
        let disciplinary = rng.bernoulli(0.05);
        let reason = if disciplinary { 0 } else { pick(rng, &reason_w) };
        let month = 1 + rng.below(12);
        let season = match month {
            7..=9 => 1,
            10..=12 => 2,
            1..=3 => 3,
            _ => 4,
        };
        let day = 2 + rng.below(5);
        let load = (270.0 + 35.0 * rng.normal()).round();
        let hit = (93.0 + 3.5 * rng.normal()).round().clamp(81.0, 100.0);
        let bmi = (e.weight / (e.height / 100.0).powi(2)).round();
        let reason_effect = match reason {
            23 | 28 | 27 | 25 => -1.2,
            13 | 19 | 10 | 11 | 18 => 1.0,
            _ => 0.0,
        };
        let logit = -1.9 + 0.13 * (e.age - 37.0) + reason_effect + 0.15 * e.son
            + 0.3 * f64::from(u8::from(e.drinker))
            + 0.03 * (bmi - 26.0)
            + 0.6 * rng.normal();
        let hours = if reason == 0 {
            0.0
        } else if rng.bernoulli(sigmoid(logit)) {
            [16.0, 24.0, 32.0, 40.0, 56.0, 64.0, 80.0, 120.0][pick(rng, &[6.0, 5.0, 3.0, 3.0, 1.0, 1.0, 1.0, 0.5])]
        } else {
            [1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 8.0][pick(rng, &[2.0, 4.0, 3.0, 1.5, 0.5, 0.3, 6.0])]
        };
        s.push(vec![
            (id + 1).to_string(),
            reason.to_string(),
            month.to_string(),
            day.to_string(),
            season.to_string(),
            int(e.transport),
            int(e.distance),
            int(e.service),
            int(e.age),
            int(load),
            int(hit),
            u8::from(disciplinary).to_string(),
            e.education.to_string(),
            int(e.son),
            u8::from(e.drinker).to_string(),
            u8::from(e.smoker).to_string(),
            int(e.pet),
            int(e.weight),
            int(e.height),
            int(bmi),
            int(hours),
        ]);
    }
    s
}

/// Cleveland-style heart records. Men have more disease; cholesterol,
/// thalassemia and resting blood pressure differ by sex.
fn heart(rng: &mut Rng) -> Sheet {
    let mut s = Sheet::new(&[
        "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach", "exang", "oldpeak",
        "slope", "ca", "thal", "num",
    ]);
    for _ in 0..303 {
        let male = rng.bernoulli(0.68);
        let m = f64::from(u8::from(male));
        let age = (55.5 - 1.8 * m + 9.0 * rng.normal()).round().clamp(29.0, 77.0);
        let sick = rng.bernoulli(sigmoid(-1.05 + 0.04 * (age - 54.0) + 1.25 * m));
        let d = f64::from(u8::from(sick));
        let num = if sick { 1 + pick(rng, &[55.0, 36.0, 35.0, 13.0]) } else { 0 };
        let cp = if sick {
            1 + pick(rng, &[0.1, 0.15, 0.22, 0.53])
        } else {
            1 + pick(rng, &[0.1, 0.25, 0.35, 0.3])
        };
        let trestbps = (133.0 - 4.0 * m + 3.0 * d + 17.0 * rng.normal()).round().clamp(94.0, 200.0);
        let chol = (278.0 - 45.0 * m + 8.0 * d + 48.0 * rng.normal()).round().clamp(126.0, 564.0);
        let fbs = rng.bernoulli(0.12 + 0.05 * m);
        let restecg = pick(rng, &[0.5, 0.015, 0.485]);
        let thalach = (162.0 - 10.0 * d - 0.9 * (age - 54.0) - 5.0 * m + 21.0 * rng.normal())
            .round()
            .clamp(71.0, 202.0);
        let exang = rng.bernoulli(0.16 + 0.3 * d);
        let oldpeak = (0.6 + 0.6 * d + 1.0 * rng.normal()).max(0.0);
        let slope = if sick {
            1 + pick(rng, &[0.25, 0.65, 0.1])
        } else {
            1 + pick(rng, &[0.65, 0.3, 0.05])
        };
        let ca = if rng.bernoulli(0.013) {
            "?".to_string()
        } else {
            (pick(rng, if sick { &[0.5, 0.25, 0.15, 0.1] } else { &[0.75, 0.15, 0.07, 0.03] }))
                .to_string()
        };
        let thal = if rng.bernoulli(0.007) {
            "?".to_string()
        } else {
            let p7 = 0.04 + 0.25 * d + 0.4 * m;
            let p6 = 0.06;
            ["3", "6", "7"][pick(rng, &[1.0 - p7 - p6, p6, p7])].to_string()
        };
        s.push(vec![
            int(age),
            u8::from(male).to_string(),
            cp.to_string(),
            int(trestbps),
            int(chol),
            u8::from(fbs).to_string(),
            restecg.to_string(),
            int(thalach),
            u8::from(exang).to_string(),
            fx(oldpeak, 1),
            slope.to_string(),
            ca,
            thal,
            num.to_string(),
        ]);
    }
    s
}

/// NYC school records. Economic need follows a poverty factor that is
/// partly shared with the school's Black/Hispanic share.
fn passnyc(rng: &mut Rng) -> Sheet {
    let mut s = Sheet::new(&[
        "School Name",
        "District",
        "Community School?",
        "Economic Need Index",
        "School Income Estimate",
        "Percent ELL",
        "Percent Asian",
        "Percent Black",
        "Percent Hispanic",
        "Percent Black / Hispanic",
        "Percent White",
        "Student Attendance Rate",
        "Percent of Students Chronically Absent",
        "Rigorous Instruction %",
        "Collaborative Teachers %",
        "Supportive Environment %",
        "Effective School Leadership %",
        "Strong Family-Community Ties %",
        "Trust %",
        "Average ELA Proficiency",
        "Average Math Proficiency",
    ]);
    // district-level Black/Hispanic share
    let district_bh: Vec<f64> = (0..32)
        .map(|_| {
            let u = rng.uniform();
            if u < 0.25 {
                25.0 + 30.0 * rng.uniform()
            } else {
                65.0 + 33.0 * rng.uniform()
            }
        })
        .collect();
    for i in 0..1272 {
        let district = rng.below(32);
        let bh = (district_bh[district] + 14.0 * rng.normal()).clamp(3.0, 99.0);
        let black_share = 0.2 + 0.6 * rng.uniform();
        let black = bh * black_share;
        let hisp = bh - black;
        let rest = 100.0 - bh;
        let asian_share = 0.15 + 0.6 * rng.uniform();
        let asian = rest * asian_share;
        let white = rest - asian;
        let zg = (bh - 70.0) / 25.0;
        let pov = 0.55 * zg + 0.85 * rng.normal();
        let eni = (0.66 + 0.13 * pov + 0.03 * rng.normal()).clamp(0.05, 0.99);
        let income = 58000.0 - 14000.0 * pov + 9000.0 * rng.normal();
        let ell = (4.0 + 0.18 * hisp + 0.15 * asian + 3.0 * pov + 5.0 * rng.normal()).clamp(0.0, 95.0);
        let attend = (93.5 - 1.6 * pov + 1.3 * rng.normal()).clamp(70.0, 99.0);
        let chronic = (19.0 + 6.5 * pov + 4.5 * rng.normal()).clamp(0.0, 80.0);
        let survey = |rng: &mut Rng, base: f64, slope: f64| (base + slope * pov + 6.0 * rng.normal()).clamp(20.0, 100.0);
        let rigorous = survey(rng, 89.0, -1.0);
        let collab = survey(rng, 88.0, -0.5);
        let support = survey(rng, 87.0, -1.5);
        let leader = survey(rng, 82.0, -0.5);
        let family = survey(rng, 85.0, 0.5);
        let trust = survey(rng, 90.0, -0.5);
        let ela = (2.55 - 0.28 * pov + 0.2 * rng.normal()).clamp(1.5, 4.0);
        let math = (2.65 - 0.32 * pov + 0.25 * rng.normal()).clamp(1.5, 4.2);
        let community = rng.bernoulli(if pov > 0.8 { 0.2 } else { 0.04 });
        let missing_eni = rng.bernoulli(0.02);
        let missing_income = rng.bernoulli(0.31);
        let missing_survey = rng.bernoulli(0.03);
        let opt = |missing: bool, v: String| if missing { String::new() } else { v };
        s.push(vec![
            format!("School {:04}", i + 1),
            (district + 1).to_string(),
            if community { "Yes" } else { "No" }.to_string(),
            opt(missing_eni, fx(eni, 3)),
            opt(missing_income, fx(income.max(12000.0), 2)),
            int(ell),
            int(asian),
            int(black),
            int(hisp),
            int(bh),
            int(white),
            int(attend),
            int(chronic),
            opt(missing_survey, int(rigorous)),
            opt(missing_survey, int(collab)),
            opt(missing_survey, int(support)),
            opt(missing_survey, int(leader)),
            opt(missing_survey, int(family)),
            opt(missing_survey, int(trust)),
            opt(missing_survey, fx(ela, 2)),
            opt(missing_survey, fx(math, 2)),
        ]);
    }
    s
}

const LEMAS: [&str; 22] = [
    "LemasSwornFT",
    "LemasSwFTPerPop",
    "LemasSwFTFieldOps",
    "LemasSwFTFieldPerPop",
    "LemasTotalReq",
    "LemasTotReqPerPop",
    "PolicReqPerOffic",
    "PolicPerPop",
    "RacialMatchCommPol",
    "PctPolicWhite",
    "PctPolicBlack",
    "PctPolicHisp",
    "PctPolicAsian",
    "PctPolicMinor",
    "OfficAssgnDrugUnits",
    "NumKindsDrugsSeiz",
    "PolicAveOTWorked",
    "PolicCars",
    "PolicOperBudg",
    "LemasPctPolicOnPatr",
    "LemasGangUnitDeploy",
    "PolicBudgPerPop",
];

/// US communities, every measure normalized to [0, 1] with two decimals.
/// Violent crime follows a disadvantage factor shared with the Black
/// population share; the police (LEMAS) columns exist for about one
/// community in six.
fn communities(rng: &mut Rng) -> Sheet {
    let dense = [
        "population",
        "householdsize",
        "racepctblack",
        "racePctWhite",
        "racePctAsian",
        "racePctHisp",
        "agePct12t29",
        "agePct65up",
        "pctUrban",
        "medIncome",
        "pctWSocSec",
        "pctWPubAsst",
        "PctPopUnderPov",
        "PctLess9thGrade",
        "PctUnemployed",
        "PctEmploy",
        "MalePctDivorce",
        "TotalPctDiv",
        "PctKids2Par",
        "PctWorkMom",
        "PctIlleg",
        "PctNotSpeakEnglWell",
        "PctPersDenseHous",
        "PctHousOccup",
        "PctVacantBoarded",
        "MedRentPctHousInc",
        "NumStreet",
        "PctForeignBorn",
        "PctSameCity85",
    ];
    let mut header: Vec<&str> = vec!["state", "county", "community", "communityname", "fold"];
    header.extend_from_slice(&dense);
    header.extend_from_slice(&LEMAS);
    header.push("ViolentCrimesPerPop");
    let mut s = Sheet::new(&header);
    let n = 1994;
    for i in 0..n {
        let state = 1 + rng.below(56);
        let has_county = rng.bernoulli(0.41);
        let black = unit((0.25 * rng.normal().abs().powf(1.6)).min(1.0) + 0.02 * rng.uniform());
        let hisp = unit(0.12 * rng.normal().abs().powf(1.8));
        let asian = unit(0.1 * rng.normal().abs().powf(1.8));
        let white = unit(1.0 - 0.9 * black - 0.7 * hisp - 0.3 * asian + 0.03 * rng.normal());
        let zb = (black - 0.18) / 0.22;
        let dis = 0.5 * zb + 0.25 * (hisp - 0.1) / 0.15 + 0.8 * rng.normal();
        let pop = unit(0.03 + 0.1 * rng.normal().abs().powf(2.0));
        let f = |rng: &mut Rng, base: f64, slope: f64, noise: f64| unit(base + slope * dis + noise * rng.normal());
        let vals = [
            pop,
            f(rng, 0.46, 0.02, 0.15),
            black,
            white,
            asian,
            hisp,
            f(rng, 0.42, 0.03, 0.15),
            f(rng, 0.42, -0.02, 0.17),
            unit(if rng.bernoulli(0.3) { 0.0 } else { 0.9 + 0.1 * rng.uniform() }),
            f(rng, 0.36, -0.12, 0.12),
            f(rng, 0.47, 0.02, 0.16),
            f(rng, 0.32, 0.13, 0.12),
            f(rng, 0.3, 0.15, 0.12),
            f(rng, 0.31, 0.08, 0.16),
            f(rng, 0.36, 0.12, 0.14),
            f(rng, 0.5, -0.08, 0.16),
            f(rng, 0.46, 0.1, 0.14),
            f(rng, 0.49, 0.1, 0.14),
            f(rng, 0.61, -0.15, 0.12),
            f(rng, 0.5, 0.0, 0.17),
            f(rng, 0.25, 0.15, 0.12),
            f(rng, 0.16, 0.06, 0.15),
            f(rng, 0.19, 0.08, 0.15),
            f(rng, 0.72, -0.05, 0.16),
            f(rng, 0.1, 0.08, 0.1),
            f(rng, 0.49, 0.05, 0.15),
            unit(0.02 + 0.06 * rng.normal().abs().powf(2.0) + 0.03 * dis.max(0.0)),
            f(rng, 0.22, 0.02, 0.2),
            f(rng, 0.65, -0.03, 0.18),
        ];
        let crime = unit(0.2 + 0.14 * dis + 0.1 * rng.normal());
        let lemas = rng.bernoulli(0.16);
        let mut row = vec![
            state.to_string(),
            if has_county { (1 + rng.below(200)).to_string() } else { "?".into() },
            if has_county { (1 + rng.below(90000)).to_string() } else { "?".into() },
            format!("community{:04}", i + 1),
            (1 + i % 10).to_string(),
        ];
        row.extend(vals.iter().map(|v| fx(*v, 2)));
        for _ in 0..LEMAS.len() {
            row.push(if lemas { fx(unit(0.2 + 0.2 * rng.normal()), 2) } else { "?".into() });
        }
        row.push(fx(crime, 2));
        s.push(row);
    }
    s
}
