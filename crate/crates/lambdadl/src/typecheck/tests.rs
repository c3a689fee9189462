use super::*;
use crate::kb::KnowledgeBase;
use crate::reasoner::{Budget, TableauReasoner};
use crate::syntax::{parse_term, parse_type_str};

fn music() -> TableauReasoner {
    let kb = KnowledgeBase::parse(include_str!("../../../../examples/music.kb")).unwrap();
    TableauReasoner::with_budget(kb, Budget::default())
}

fn check(ks: &TableauReasoner, src: &str) -> Result<Type, TypeError> {
    typecheck(ks, &TypingContext::new(), &parse_term(src).unwrap())
}

fn ty(src: &str) -> Type {
    parse_type_str(src).unwrap()
}

#[test]
fn lub_rules() {
    assert_eq!(lub(&Type::BOOL, &Type::BOOL).unwrap(), Type::BOOL);
    assert_eq!(
        lub(&ty("MusicArtist"), &ty("Song")).unwrap(),
        ty("MusicArtist | Song")
    );
    assert_eq!(
        lub(&ty("MusicArtist list"), &ty("Song list")).unwrap(),
        ty("(MusicArtist | Song) list")
    );
    assert_eq!(
        lub(&ty("MusicArtist -> bool"), &ty("Song -> bool")).unwrap(),
        ty("(MusicArtist & Song) -> bool")
    );
    assert!(lub(&Type::BOOL, &Type::STRING).is_err());
    assert!(lub(&Type::BOOL, &ty("Song")).is_err());
}

#[test]
fn glb_rules() {
    assert_eq!(glb(&Type::BOOL, &Type::BOOL).unwrap(), Type::BOOL);
    assert_eq!(
        glb(&ty("MusicArtist"), &ty("Song")).unwrap(),
        ty("MusicArtist & Song")
    );
    assert_eq!(
        glb(&ty("MusicArtist list"), &ty("Song list")).unwrap(),
        ty("(MusicArtist & Song) list")
    );
    // glb on functions takes the lub of the domains.
    assert_eq!(
        glb(&ty("MusicArtist -> bool"), &ty("Song -> bool")).unwrap(),
        ty("(MusicArtist | Song) -> bool")
    );
    assert!(glb(&Type::BOOL, &ty("Song list")).is_err());
}

#[test]
fn subtyping_over_music() {
    let ks = music();
    assert!(is_subtype(&ks, &ty("{hendrix}"), &ty("MusicArtist")).unwrap());
    assert!(!is_subtype(&ks, &ty("MusicArtist"), &ty("exists influencedBy.Top")).unwrap());
    assert!(is_subtype(&ks, &ty("MusicArtist list"), &ty("MusicArtist list")).unwrap());
    assert!(is_subtype(&ks, &ty("MusicGroup list"), &ty("MusicArtist list")).unwrap());
    // Contravariant domains, covariant codomains.
    assert!(is_subtype(
        &ks,
        &ty("MusicArtist -> MusicGroup"),
        &ty("MusicGroup -> MusicArtist")
    )
    .unwrap());
    assert!(!is_subtype(
        &ks,
        &ty("MusicGroup -> MusicArtist"),
        &ty("MusicArtist -> MusicGroup")
    )
    .unwrap());
    assert!(!is_subtype(&ks, &Type::BOOL, &ty("Song")).unwrap());
}

#[test]
fn query_type_is_concept_list() {
    let ks = music();
    assert_eq!(
        check(&ks, "query MusicArtist & exists recorded.Song").unwrap(),
        ty("(MusicArtist & exists recorded.Song) list")
    );
}

#[test]
fn unsatisfiable_query_rejected() {
    let ks = music();
    let err = check(&ks, "query Song & !Song").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::UnsatisfiableQuery);
    assert_eq!(err.rule, "T-QUERY");
}

#[test]
fn object_literal_types_as_nominal() {
    let ks = music();
    assert_eq!(check(&ks, "hendrix").unwrap(), ty("{hendrix}"));
    let err = check(&ks, "elvis").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::UnknownObject);
    assert_eq!(err.rule, "T-OBJECT");
}

#[test]
fn projection_types_by_inverse() {
    let ks = music();
    assert_eq!(
        check(&ks, "hendrix.recorded").unwrap(),
        ty("exists recorded^-.{hendrix} list")
    );
    assert_eq!(
        check(&ks, "machineGun.recorded^-").unwrap(),
        ty("exists recorded.{machineGun} list")
    );
}

#[test]
fn data_projection_types_by_range() {
    let ks = music();
    assert_eq!(check(&ks, "hendrix.artistName").unwrap(), ty("string list"));
    let err = check(&ks, "hendrix.artistName^-").unwrap_err();
    assert_eq!(err.rule, "T-PROJ");
}

#[test]
fn projection_needs_concept_subject() {
    let ks = music();
    let err = check(&ks, "true.recorded").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::NonConceptProjection);
    let err = check(&ks, "(query Song).recorded").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::NonConceptProjection);
}

#[test]
fn rejected_listing_cites_s_concept() {
    let ks = music();
    let err = check(
        &ks,
        "let f = fun(x:exists influencedBy.Top). x.influencedBy in \
         f (head (query MusicArtist))",
    )
    .unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::Mismatch);
    assert_eq!(err.rule, "S-CONCEPT");
}

#[test]
fn application_accepts_subtype_arguments() {
    let ks = music();
    // {hendrix} <: MusicArtist via the KB, so the application checks.
    assert_eq!(
        check(&ks, "(fun(a:MusicArtist). a.artistName) hendrix").unwrap(),
        ty("string list")
    );
}

#[test]
fn if_joins_with_lub() {
    let ks = music();
    assert_eq!(
        check(&ks, "if true then hendrix else beatles").unwrap(),
        ty("{hendrix} | {beatles}")
    );
    assert_eq!(check(&ks, "if true then true else false").unwrap(), Type::BOOL);
    let err = check(&ks, "if hendrix then true else false").unwrap_err();
    assert_eq!(err.rule, "T-IF");
}

#[test]
fn list_rules() {
    let ks = music();
    assert_eq!(
        check(&ks, "cons hendrix (cons beatles nil[MusicArtist])").unwrap(),
        ty("({hendrix} | ({beatles} | MusicArtist)) list")
    );
    assert_eq!(check(&ks, "null (query Song)").unwrap(), Type::BOOL);
    assert_eq!(check(&ks, "head (query Song)").unwrap(), ty("Song"));
    assert_eq!(check(&ks, "tail (query Song)").unwrap(), ty("Song list"));
    let err = check(&ks, "head true").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::NonListElim);
    let err = check(&ks, "cons true false").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::NonListElim);
}

#[test]
fn equivalence_rules() {
    let ks = music();
    assert_eq!(check(&ks, "hendrix = beatles").unwrap(), Type::BOOL);
    assert_eq!(check(&ks, "true = false").unwrap(), Type::BOOL);
    assert_eq!(check(&ks, "\"a\" = \"b\"").unwrap(), Type::BOOL);
    // Primitive kinds must match.
    let err = check(&ks, "true = \"a\"").unwrap_err();
    assert_eq!(err.rule, "T-EQN");
    // Mixing objects and primitives is rejected.
    let err = check(&ks, "hendrix = true").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::Mismatch);
    // Lists and functions have no equivalence.
    let err = check(&ks, "(query Song) = (query Song)").unwrap_err();
    assert_eq!(err.rule, "T-EQN");
    // Provably disjoint concept types cannot be compared.
    let err = check(&ks, "(head (query Song & !MusicArtist)) = (head (query MusicArtist))")
        .unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::EmptyIntersection);
}

#[test]
fn dispatch_side_conditions() {
    let ks = music();
    // MusicGroup after MusicArtist is dead: subsumed by the earlier arm.
    let err = check(
        &ks,
        "case head (query MusicArtist) of \
         | type MusicArtist as a -> true \
         | type MusicGroup as g -> false \
         | default true",
    )
    .unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::SubsumedCase);
    assert_eq!(err.rule, "T-DISPATCH");

    // An arm that cannot intersect the scrutinee type is dead.
    let err = check(
        &ks,
        "case head (query Song & !MusicArtist) of \
         | type MusicArtist as a -> true \
         | default false",
    )
    .unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::EmptyIntersection);

    // The same arms in dispatchable order are fine.
    assert_eq!(
        check(
            &ks,
            "case head (query MusicArtist) of \
             | type MusicGroup as g -> true \
             | type MusicArtist as a -> false \
             | default true",
        )
        .unwrap(),
        Type::BOOL
    );
}

#[test]
fn dispatch_joins_arm_types() {
    let ks = music();
    assert_eq!(
        check(
            &ks,
            "case head (query MusicArtist) of \
             | type MusicGroup as g -> g \
             | default hendrix",
        )
        .unwrap(),
        ty("MusicGroup | {hendrix}")
    );
    // Zero arms: the default's type.
    assert_eq!(
        check(&ks, "case hendrix of | default true").unwrap(),
        Type::BOOL
    );
}

#[test]
fn dispatch_needs_concept_scrutinee() {
    let ks = music();
    let err = check(&ks, "case true of | default false").unwrap_err();
    assert_eq!(err.rule, "T-DISPATCH");
}

#[test]
fn fix_requires_endofunction() {
    let ks = music();
    assert_eq!(
        check(&ks, "fix (fun(x:bool). x)").unwrap(),
        Type::BOOL
    );
    // Codomain a proper subtype of the domain is acceptable.
    assert_eq!(
        check(&ks, "fix (fun(x:MusicArtist). beatles)").unwrap(),
        ty("{beatles}")
    );
    let err = check(&ks, "fix (fun(x:bool). \"s\")").unwrap_err();
    assert_eq!(err.rule, "T-FIX");
    let err = check(&ks, "fix true").unwrap_err();
    assert_eq!(err.rule, "T-FIX");
}

#[test]
fn unbound_variable_reported() {
    let ks = music();
    let term = crate::syntax::parse_term_with_bound("x", &["x".into()].into()).unwrap();
    let err = typecheck(&ks, &TypingContext::new(), &term).unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::UnboundVariable);
}

#[test]
fn unknown_names_in_concepts_rejected() {
    let ks = music();
    let err = check(&ks, "query Unknown").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::UnknownName);
    let err = check(&ks, "hendrix.unknownRole").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::UnknownName);
    let err = check(&ks, "query exists recorded.xsd:string").unwrap_err();
    assert_eq!(err.kind, TypeErrorKind::InvalidConcept);
}

#[test]
fn context_shadowing_is_rightmost() {
    let ctx = TypingContext::new()
        .extended("x", Type::BOOL)
        .extended("x", Type::STRING);
    assert_eq!(ctx.lookup("x"), Some(&Type::STRING));
}

#[test]
fn paper_listings_typecheck() {
    let ks = music();
    // Mapping to the recordings.
    assert_eq!(
        check(
            &ks,
            "let getRecordings = fun(a:exists recorded.Song). a.recorded in getRecordings"
        )
        .unwrap(),
        ty("exists recorded.Song -> exists recorded^-.(exists recorded.Song) list")
    );
    // Mapping an artist to its name.
    assert_eq!(
        check(
            &ks,
            "let getArtistName = fun(a:exists artistName.xsd:string). head (a.artistName) in \
             getArtistName"
        )
        .unwrap(),
        ty("exists artistName.xsd:string -> string")
    );
    // A music artist can flow into the name function: the KB proves
    // MusicArtist <: exists artistName.xsd:string.
    assert_eq!(
        check(
            &ks,
            "let getArtistName = fun(a:exists artistName.xsd:string). head (a.artistName) in \
             getArtistName (head (query MusicArtist))"
        )
        .unwrap(),
        Type::STRING
    );
}

#[test]
fn full_influence_pipeline_typechecks() {
    let ks = music();
    let src = include_str!("../../../../examples/get_influences.ldl");
    let term = parse_term(src).unwrap();
    let result = typecheck(&ks, &TypingContext::new(), &term).unwrap();
    assert_eq!(result, ty("exists influencedBy.Top -> string list"));
}
