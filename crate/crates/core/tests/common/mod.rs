//! Shared fixture data for integration tests: two-generator groups given at
//! 70 decimal digits (solutions of the group relations refined far beyond the
//! working precision, so enclosure radii are dominated by the parser's half
//! ulp of the last printed digit).

// Each test target uses its own subset of these fixtures.
#![allow(dead_code)]

use tessella::isometry::{Generators, Isometry};
use tessella::rigor::{enclosure_from_decimal, ComplexEnclosure, DEFAULT_PREC};

pub fn iso(entries: [&str; 8], word: &str) -> Isometry {
    let e = |s: &str| enclosure_from_decimal(s, DEFAULT_PREC).unwrap();
    let c = |re: &str, im: &str| ComplexEnclosure::new(e(re), e(im));
    Isometry::from_entries(
        c(entries[0], entries[1]),
        c(entries[2], entries[3]),
        c(entries[4], entries[5]),
        c(entries[6], entries[7]),
        word,
    )
    .normalized()
    .unwrap()
}

pub const N2_F: [&str; 8] = [
    "0.7429341358783228390914319379472662810962429920011865054758692062190578",
    "-1.529085513635746125160990523790225210619365049838909743140771176320240",
    "0",
    "0",
    "0",
    "0",
    "0.2570658641216771609085680620527337189037570079988134945241307937809422",
    "0.5290855136357461251609905237902252106193650498389097431407711763202398",
];

pub const N2_W: [&str; 8] = [
    "0.3913565516241799106043746704208614703146241868326926535621934472235751",
    "-0.9602210326299630178826825971055433404669946183358011983514823117719075",
    "-0.3067712168723492064037613902143940612739668739151862407434615083185670",
    "-1.267243937206032900411705494627669709390900467510342321179892439939251",
    "0.5916200014654902493503068025140014867710190625189767964626478836241005",
    "-0.4880733646183949858373816818312665436854980503440802603918644758580692",
    "0.6086434483758200893956253295791385296853758131673073464378065527764249",
    "-0.03977896737003698211731740289445665953300538166419880164851768822809252",
];

pub const N3_F: [&str; 8] = [
    "1.404292212324886160678175784438326234914366156803880745279071359399634",
    "-1.179267297656976882827409344556527525394099586312704258612966633945307",
    "0",
    "0",
    "0",
    "0",
    "0.4176075418869173270007709963186664852613509074502050168945458383210707",
    "0.3506897731682524797730731559929343756403373345657269750398691594790773",
];

pub const N3_W: [&str; 8] = [
    "1.074824684769813406807568391975738348148469916884888762539255938221193",
    "-0.8503817267942076039049888459680196740837799376812997377638919106832049",
    "0.3135165209704030306077710465779744958752287160703495953338630372811986",
    "-1.034642836693533053219008473551173291432100803863727812194312640020758",
    "0.4937655253736005780952147277907035563709096100835414134087653423758382",
    "-0.3221276141388832574522875404514589988264234246684057921622117037320238",
    "0.7470750694419900808713783887812543720272471473691969996343612594995116",
    "0.02180420230548320085065265740442652433001768593432245419079443621697497",
];

pub const N4_F: [&str; 8] = [
    "1.354619901468891950804861034191318695574068815796968126003555790645168",
    "-1.225125453962854059632648277116373043965297371820167995185960283228020",
    "0",
    "0",
    "0",
    "0",
    "0.4060699519333918339971793819359005616401260984169838285416932170689099",
    "0.3672518273676754232146161934731031081911312101826206248715531725516387",
];

pub const N4_W: [&str; 8] = [
    "1.023055387846070710232397311525620139359183454331952053212751448568829",
    "-0.8773337241036721994862281031368176877236924801108821920757092332792797",
    "0.2659451415972920187147522274532113512074825102791738532723094527680061",
    "-1.071643064017511334658099301121070568932493373277382599163460338317382",
    "0.5015552044116572699743683803134812557743414524727655671230687203610127",
    "-0.3374932082641828911060542819647856847289639573551053568064616442885863",
    "0.7376344655562130745696431046015991178550114598819999013324975591452496",
    "0.01946009750849356306819601949354775194952631847333482176130212260289868",
];

pub fn n2_generators() -> Generators {
    Generators::new(vec![('f', iso(N2_F, "f")), ('w', iso(N2_W, "w"))]).unwrap()
}

pub fn n3_generators() -> Generators {
    Generators::new(vec![('f', iso(N3_F, "f")), ('w', iso(N3_W, "w"))]).unwrap()
}

pub fn n4_generators() -> Generators {
    Generators::new(vec![('f', iso(N4_F, "f")), ('w', iso(N4_W, "w"))]).unwrap()
}

/// The group relations each generator pair satisfies (both evaluate to +I).
pub fn relators(name: &str) -> [&'static str; 2] {
    match name {
        "N2" => ["FwfwfWffWfwfwFww", "FFwFFwwFwfwfwFww"],
        "N3" => [
            "FFwfwFFwwFWFwFWfWFWffWFWfWFwFWFww",
            "FFwfwFwfWfwfWWfwfWfwFwfwFFwwFWFww",
        ],
        "N4" => [
            "FFwfwFwfWfwfWfwFwfwFFwwFWFwFWFww",
            "FFwfwFwfwFFwwFWFwFWfWFWfWFwFWFww",
        ],
        _ => panic!("unknown fixture {name}"),
    }
}
